"""Independent real solution pairs of the stationary wave equation.

A :class:`BasisPair` bundles two independent real solutions (phi1, phi2)
of the stationary Klein-Gordon equation (or of the Schroedinger equation in
non-relativistic mode) together with their first derivatives and constant
Wronskian W = phi1'*phi2 - phi1*phi2'.  The sign convention W > 0 is
enforced by ordering: a pair handed in with W < 0 is swapped, so the
direction of motion is carried entirely by the constant ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels as K
from .errors import (
    NoSolutionError,
    OutOfDomainError,
    RqtrajError,
    TurningPointError,
    WronskianDriftError,
)
from .model import (
    DEFAULT_TURNING_TOL,
    PhysicalParams,
    Potential,
    RegionClass,
    region_of_epsilon,
)

ANALYTIC_TRIG = "analytic_trig"
ANALYTIC_EXP = "analytic_exp"
NUMERIC = "numeric"
CUSTOM = "custom"


def _contig(x):
    return np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)


@dataclass(frozen=True)
class BasisPair:
    """Evaluator for (phi1, phi1', phi2, phi2') plus pair metadata."""

    provenance: str
    hbar: float
    wronskian_ref: float
    domain: tuple[float, float]
    evaluator: Callable
    rate: float | None = None  # wavenumber k (trig) or decay rate kappa (exp)

    def eval(self, x):
        """(phi1, phi1', phi2, phi2') as float64 arrays over atleast-1d x."""
        xs = _contig(x)
        lo, hi = self.domain
        if xs.size and (xs.min() < lo or xs.max() > hi):
            raise OutOfDomainError(
                f"x in [{xs.min()}, {xs.max()}] exceeds basis domain [{lo}, {hi}]"
            )
        p1, d1, p2, d2 = self.evaluator(xs)
        return (_contig(p1), _contig(d1), _contig(p2), _contig(d2))

    @staticmethod
    def from_callable(fn, hbar, domain=(-math.inf, math.inf), provenance=CUSTOM, x_ref=None):
        """Wrap a raw evaluator, measuring W and reordering to make it positive."""
        lo, hi = domain
        if x_ref is None:
            x_ref = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
        p1, d1, p2, d2 = (np.atleast_1d(np.asarray(v, float)) for v in fn(np.atleast_1d(float(x_ref))))
        w = float(d1[0] * p2[0] - p1[0] * d2[0])
        if w == 0.0:
            raise NoSolutionError("pair has zero Wronskian: solutions are dependent")
        if w < 0.0:
            swapped = lambda xs, _fn=fn: (lambda t: (t[2], t[3], t[0], t[1]))(_fn(xs))
            return BasisPair(provenance, float(hbar), -w, domain, swapped)
        return BasisPair(provenance, float(hbar), w, domain, fn)


def constant_basis(
    params: PhysicalParams,
    epsilon: float,
    region: RegionClass | None = None,
    tol_turning: float = DEFAULT_TURNING_TOL,
) -> BasisPair:
    """Closed-form pair for a constant potential with local energy ``epsilon``.

    Oscillatory regime: phi1 = sin(kx), phi2 = cos(kx) with
    k = sqrt(eps^2 - m^2 c^4)/(hbar c), W = k.  Forbidden regime:
    phi1 = e^{kappa x}, phi2 = e^{-kappa x} with
    kappa = sqrt(m^2 c^4 - eps^2)/(hbar c), W = 2 kappa.  In
    non-relativistic mode the rates are sqrt(2 m |eps|)/hbar.
    """
    if region is None:
        region = region_of_epsilon(params, epsilon, tol_turning)
    if region is RegionClass.TURNING:
        raise TurningPointError(
            f"epsilon={epsilon!r} sits at a turning point; the constant-potential pair degenerates"
        )
    e0 = params.rest_energy
    if params.relativistic:
        rate = math.sqrt(abs(epsilon * epsilon - e0 * e0)) / (params.hbar * params.light_speed)
    else:
        rate = math.sqrt(2.0 * params.mass * abs(epsilon)) / params.hbar
    if region is RegionClass.PROPAGATING:
        return BasisPair(
            ANALYTIC_TRIG,
            params.hbar,
            rate,
            (-math.inf, math.inf),
            lambda xs, k=rate: K.trig_pair(k, _contig(xs)),
            rate=rate,
        )
    return BasisPair(
        ANALYTIC_EXP,
        params.hbar,
        2.0 * rate,
        (-math.inf, math.inf),
        lambda xs, k=rate: K.exp_pair(k, _contig(xs)),
        rate=rate,
    )


def _gamma_coefficient(params, spec, energy, xs, side=None):
    """phi''/phi coefficient of the stationary wave equation at xs."""
    v, _, _ = spec.evaluate(xs, side=side)
    if params.relativistic:
        eps = energy - v
        e0 = params.rest_energy
        return (e0 * e0 - eps * eps) / (params.hbar * params.light_speed) ** 2
    return 2.0 * params.mass * (v - energy) / params.hbar**2


def numeric_basis(
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    domain: tuple[float, float],
    rtol: float = 1e-10,
    atol: float = 1e-12,
    wronskian_tol: float = 1e-9,
) -> BasisPair:
    """Integrate the wave equation for a smooth potential over ``domain``.

    Initial data at the left edge is the canonical (phi1, phi1') = (0, 1),
    (phi2, phi2') = (1, 0), which fixes W = 1.  The Wronskian drift over the
    domain is verified against ``wronskian_tol`` and the pair is rejected if
    the bound fails.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError(f"empty domain ({lo}, {hi})")
    if not (spec.bounds[0] <= lo and hi <= spec.bounds[1]):
        raise OutOfDomainError(f"domain ({lo}, {hi}) exceeds potential bounds {spec.bounds}")
    if spec.breakpoints_in(lo, hi):
        raise ValueError("potential has discontinuities inside the domain; integrate per segment")

    def rhs(x, y):
        g = _gamma_coefficient(params, spec, energy, x)
        return (y[1], g * y[0], y[3], g * y[2])

    sol = solve_ivp(
        rhs, (lo, hi), (0.0, 1.0, 1.0, 0.0), method="DOP853",
        dense_output=True, rtol=rtol, atol=atol,
    )
    if not sol.success:
        raise RqtrajError(f"basis integration failed: {sol.message}")

    def evaluate(xs, _s=sol.sol):
        y = _s(_contig(xs))
        return y[0], y[1], y[2], y[3]

    pair = BasisPair(NUMERIC, params.hbar, 1.0, (lo, hi), evaluate)
    grid = np.linspace(lo, hi, 513)
    w = wronskian(pair, grid)
    drift = float(np.max(np.abs(w - 1.0)))
    if drift > wronskian_tol:
        raise WronskianDriftError(
            f"relative Wronskian drift {drift:.3e} exceeds {wronskian_tol:.1e}"
        )
    return pair


def wronskian(basis: BasisPair, x):
    """phi1'*phi2 - phi1*phi2' at x (constant up to solver error)."""
    p1, d1, p2, d2 = basis.eval(x)
    w = d1 * p2 - p1 * d2
    return float(w[0]) if np.ndim(x) == 0 else w


def _verification_window(basis_old, basis_new, x_ref):
    lo = max(basis_old.domain[0], basis_new.domain[0])
    hi = min(basis_old.domain[1], basis_new.domain[1])
    rates = [b.rate for b in (basis_old, basis_new) if b.rate]
    span = 8.0 / min(rates) if rates else 8.0
    return max(lo, x_ref - span), min(hi, x_ref + span)


def reparametrize_constants(
    basis_old: BasisPair,
    basis_new: BasisPair,
    consts,
    x_ref: float | None = None,
    n_verify: int = 129,
    rel_tol: float = 1e-8,
):
    """Constants (a~, b~) that reproduce the old conjugate momentum in the
    new basis.

    Both pairs must solve the same equation at the same energy over a common
    domain; then the new pair is a constant linear combination of the old
    one.  The combination matrix is read off from Wronskians at one
    reference point (equivalent to matching P and P' there), the transformed
    constants follow in closed form, and the match is verified on
    ``n_verify`` sample points.  Failure of the global check raises
    :class:`NoSolutionError` reporting the worst deviation.
    """
    from .hj import conjugate_momentum  # deferred: hj imports nothing from here

    lo = max(basis_old.domain[0], basis_new.domain[0])
    hi = min(basis_old.domain[1], basis_new.domain[1])
    if not lo < hi:
        raise OutOfDomainError("bases have no common domain")
    if x_ref is None:
        x_ref = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
        if not lo <= x_ref <= hi:
            x_ref = lo if math.isfinite(lo) else hi

    a, b = consts.a, consts.b
    p1, d1, p2, d2 = (float(v[0]) for v in basis_old.eval(x_ref))
    t1, e1, t2, e2 = (float(v[0]) for v in basis_new.eval(x_ref))
    w = d1 * p2 - p1 * d2

    # theta_i = alpha_i * phi1 + beta_i * phi2 from Wronskians at x_ref.
    alpha = (e1 * p2 - t1 * d2) / w
    beta = -(e1 * p1 - t1 * d1) / w
    gamma = (e2 * p2 - t2 * d2) / w
    delta = -(e2 * p1 - t2 * d1) / w
    det = alpha * delta - beta * gamma
    if det == 0.0:
        raise NoSolutionError("new pair is degenerate against the old one")

    r = (a * a * delta * delta - 2.0 * a * b * gamma * delta + (1.0 + b * b) * gamma * gamma) / (a * a)
    p = a * delta - b * gamma
    q = (r * a * b - gamma * delta) / p if p != 0.0 else -gamma / a
    a_new = (delta * p - gamma * q) / det
    b_new = (alpha * q - beta * p) / det
    if a_new == 0.0:
        raise NoSolutionError("matched constants collapse to a=0")

    # Keep the reduced action continuous across the change at x_ref.
    lam_new = consts.lam
    if p2 != 0.0 and t2 != 0.0:
        lam_new = consts.lam + math.atan(a * p1 / p2 + b) - math.atan(a_new * t1 / t2 + b_new)

    new_consts = replace(consts, a=a_new, b=b_new, lam=lam_new)
    wlo, whi = _verification_window(basis_old, basis_new, x_ref)
    grid = np.linspace(wlo, whi, n_verify)
    p_old = conjugate_momentum(basis_old, consts, grid)
    p_new = conjugate_momentum(basis_new, new_consts, grid)
    dev = float(np.max(np.abs(p_new - p_old) / np.abs(p_old)))
    if not dev <= rel_tol:
        raise NoSolutionError(
            f"momentum mismatch after reparametrization: max relative deviation {dev:.3e}"
        )
    return new_consts
