"""Closed-form motion in a constant potential: oscillatory-regime
trajectories and their node geometry, and forbidden-regime trajectories
with their divergence times.

Everything here is relativistic-mode only: the node structure and the
forbidden-regime time equation have no counterpart in this package's
non-relativistic mode.  The additive action phase is absorbed into t0, so
these functions take the (a, b, t0) constants and ignore lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import LogSingularityError, VelocityPoleError, ZeroEpsilonError
from .hj import MicrostateConstants
from .model import PhysicalParams


def _require_relativistic(params):
    if not params.relativistic:
        raise ValueError("constant-potential node/tunneling formulas are relativistic-mode only")


def _require_propagating(params, epsilon):
    e0 = params.rest_energy
    if not epsilon * epsilon > e0 * e0:
        raise ValueError(f"eps^2={epsilon * epsilon!r} must exceed (mc^2)^2={e0 * e0!r}")


def _require_evanescent(params, epsilon):
    e0 = params.rest_energy
    if epsilon == 0.0:
        raise ZeroEpsilonError("eps = 0: forbidden-regime motion is undefined")
    if not epsilon * epsilon < e0 * e0:
        raise ValueError(f"eps^2={epsilon * epsilon!r} must be below (mc^2)^2={e0 * e0!r}")


def _contig_times(t):
    return np.ascontiguousarray(np.atleast_1d(t), dtype=np.float64)


@dataclass(frozen=True)
class NodeTable:
    """Node coordinates and spacings for one oscillatory configuration.

    All trajectories of the same energy pass through the nodes regardless
    of (a, b); the spacings are constant, the inter-node mean velocity is
    the classical one (and never exceeds c), and the spatial spacing is
    half the de Broglie wavelength.
    """

    n: np.ndarray
    t: np.ndarray
    x: np.ndarray
    dt: float
    dx: float
    mean_velocity: float
    lambda_db: float

    def __post_init__(self):
        if not math.isclose(abs(self.dx), 0.5 * self.lambda_db, rel_tol=1e-12):
            raise ValueError("node spacing must equal half the de Broglie wavelength")


def propagating_position(params: PhysicalParams, epsilon: float, consts: MicrostateConstants, t):
    """x(t) for eps^2 > (mc^2)^2, continuous across branch windows.

    Returns (x, branch_n).  With a = 1, b = 0 this is exactly the classical
    uniform motion; x(t) is strictly monotone with direction sign(a*eps).
    """
    _require_relativistic(params)
    _require_propagating(params, epsilon)
    e0 = params.rest_energy
    s = epsilon * epsilon - e0 * e0
    k = math.sqrt(s) / (params.hbar * params.light_speed)
    omega = s / (params.hbar * epsilon)
    scalar = np.ndim(t) == 0
    x, n = K.prop_position(_contig_times(t), consts.t0, consts.a, consts.b, 1.0 / k, omega)
    if scalar:
        return float(x[0]), int(n[0])
    return x, n


def propagating_velocity(params: PhysicalParams, epsilon: float, consts: MicrostateConstants, t):
    """Instantaneous velocity for eps^2 > (mc^2)^2; one sign, periodic with
    the node period, and can exceed c for some (a, b)."""
    _require_relativistic(params)
    _require_propagating(params, epsilon)
    e0 = params.rest_energy
    s = epsilon * epsilon - e0 * e0
    omega = s / (params.hbar * epsilon)
    pref = consts.a * params.light_speed * math.sqrt(s) / epsilon
    scalar = np.ndim(t) == 0
    v = K.prop_velocity(_contig_times(t), consts.t0, consts.a, consts.b, pref, omega)
    return float(v[0]) if scalar else v


def max_speed(params: PhysicalParams, epsilon: float, consts: MicrostateConstants) -> float:
    """Largest |xdot| over a period: |a| c sqrt(eps^2-m^2c^4) / (|eps| q_min)
    with q_min the smallest value of the quadratic form in the velocity
    denominator."""
    _require_relativistic(params)
    _require_propagating(params, epsilon)
    a, b = consts.a, consts.b
    tr = a * a + b * b + 1.0
    q_min = 0.5 * (tr - math.sqrt(tr * tr - 4.0 * a * a))
    e0 = params.rest_energy
    return (
        abs(a) * params.light_speed * math.sqrt(epsilon * epsilon - e0 * e0)
        / (abs(epsilon) * q_min)
    )


def node_table(params: PhysicalParams, epsilon: float, consts: MicrostateConstants, n_range) -> NodeTable:
    """Node coordinates t_n, x_n for the given integer indices.

    t_n = t0 + dt*(n + 1/2) and x_n = dx*(n + 1/2) with
    dt = pi*hbar*eps/(eps^2 - m^2c^4), dx = pi*hbar*c/sqrt(eps^2 - m^2c^4);
    a general t0 rigidly shifts the node times and leaves x_n unchanged.
    """
    _require_relativistic(params)
    _require_propagating(params, epsilon)
    if isinstance(n_range, tuple) and len(n_range) == 2:
        ns = np.arange(int(n_range[0]), int(n_range[1]) + 1, dtype=np.int64)
    else:
        ns = np.asarray(list(n_range), dtype=np.int64)
    e0 = params.rest_energy
    s = epsilon * epsilon - e0 * e0
    dt = math.pi * params.hbar * epsilon / s
    dx = math.pi * params.hbar * params.light_speed / math.sqrt(s)
    t_n = consts.t0 + dt * (ns + 0.5)
    x_n = dx * (ns + 0.5)
    p_cl = math.sqrt(s) / params.light_speed
    lam_db = 2.0 * math.pi * params.hbar / p_cl
    v_mean = dx / dt
    if abs(v_mean) > params.light_speed * (1.0 + 1e-15):
        raise ValueError("inter-node mean velocity exceeded c; inconsistent inputs")
    return NodeTable(ns, t_n, x_n, dt, dx, v_mean, lam_db)


def divergence_time(params: PhysicalParams, epsilon: float, consts: MicrostateConstants) -> float:
    """First time after entering the forbidden region at t0 at which the
    velocity diverges: t0 + pi*hbar*|eps| / (2 (m^2c^4 - eps^2))."""
    _require_relativistic(params)
    _require_evanescent(params, epsilon)
    e0 = params.rest_energy
    return consts.t0 + math.pi * params.hbar * abs(epsilon) / (2.0 * (e0 * e0 - epsilon * epsilon))


def evanescent_position(params: PhysicalParams, epsilon: float, consts: MicrostateConstants, t):
    """x(t) for eps^2 < (mc^2)^2 (forbidden regime).

    x(t) = (hbar c / 2 sqrt(m^2c^4 - eps^2)) * ln| (tan(beta (t-t0)) + b)/a |
    with beta = (m^2c^4 - eps^2)/(hbar eps).  The log argument hitting zero
    (the entry asymptote x -> -inf) raises LogSingularityError; the
    velocity divergence times are available from :func:`divergence_time`.
    The formula tracks the branch with e^{2 kappa x} = |(tan + b)/a|; sign
    bookkeeping of the log argument beyond one branch is an extension the
    closed form itself does not fix.
    """
    _require_relativistic(params)
    _require_evanescent(params, epsilon)
    e0 = params.rest_energy
    s = e0 * e0 - epsilon * epsilon
    beta = s / (params.hbar * epsilon)
    half_inv_kappa = params.hbar * params.light_speed / (2.0 * math.sqrt(s))
    ts = _contig_times(t)
    # Refuse times where the log argument has no significant digits left
    # (tan(...) + b cancels to rounding noise): the position is unresolvable.
    frac = beta * (ts - consts.t0) / math.pi
    u = np.tan(math.pi * (frac - np.rint(frac)))
    bad = np.abs(u + consts.b) <= 1e-12 * (1.0 + np.abs(u) + abs(consts.b))
    if np.any(bad):
        raise LogSingularityError(f"log argument vanishes at t={float(ts[bad][0])!r}")
    x = K.evan_position(ts, consts.t0, consts.a, consts.b, half_inv_kappa, beta)
    bad = ~np.isfinite(x)
    if np.any(bad):
        raise LogSingularityError(f"log argument vanishes at t={float(ts[bad][0])!r}")
    return float(x[0]) if np.ndim(t) == 0 else x


def evanescent_velocity(params: PhysicalParams, epsilon: float, consts: MicrostateConstants, t):
    """Velocity in the forbidden regime; consistent with the velocity law
    applied to the exponential-pair momentum along the tracked branch.

    Raises VelocityPoleError at (and within ~1e-9 node-period of) the
    divergence times, where tan(beta (t-t0)) blows up, and where the
    denominator b + tan(...) vanishes.
    """
    _require_relativistic(params)
    _require_evanescent(params, epsilon)
    e0 = params.rest_energy
    s = e0 * e0 - epsilon * epsilon
    beta = s / (params.hbar * epsilon)
    pref = params.light_speed * math.sqrt(s) / (2.0 * epsilon)
    ts = _contig_times(t)
    frac = beta * (ts - consts.t0) / math.pi
    at_pole = np.abs(frac + 0.5 - np.rint(frac + 0.5)) < 1e-9
    if np.any(at_pole):
        raise VelocityPoleError(f"velocity diverges at t={float(ts[at_pole][0])!r}")
    v = K.evan_velocity(ts, consts.t0, consts.a, consts.b, pref, beta)
    bad = ~np.isfinite(v)
    if np.any(bad):
        raise VelocityPoleError(f"velocity diverges at t={float(ts[bad][0])!r}")
    return float(v[0]) if np.ndim(t) == 0 else v
