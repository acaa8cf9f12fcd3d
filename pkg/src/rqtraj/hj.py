"""Reduced action, conjugate momentum and the stationary HJ residual.

The reduced action has the closed form
``S0 = hbar * arctan(a*phi1/phi2 + b) + hbar*lam`` over any solution pair of
the stationary wave equation; its gradient

    P = hbar * a * W / (phi2^2 + (a*phi1 + b*phi2)^2)

never vanishes for a != 0, which is what makes the trajectory construction
possible in classically forbidden regions.  Branch continuation of the
arctangent (the +/- pi*hbar increments at zeros of phi2) is handled here so
that S0 is continuous and strictly monotone along the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels as K
from .basis import ANALYTIC_EXP, ANALYTIC_TRIG, BasisPair, _gamma_coefficient
from .model import PhysicalParams, Potential


@dataclass(frozen=True)
class MicrostateConstants:
    """Hidden-variable integration constants selecting one trajectory.

    ``a`` and ``b`` pick the microstate (a = 1, b = 0 is the classical
    one), ``lam`` is the additive phase of the reduced action, ``t0`` and
    ``x0`` anchor the trajectory in the (t, x) plane.  ``x0 = None`` lets
    the constant-potential closed forms supply their natural anchor.
    """

    a: float
    b: float = 0.0
    lam: float = 0.0
    t0: float = 0.0
    x0: float | None = None

    def __post_init__(self):
        if self.a == 0.0:
            raise ValueError("a must be nonzero (a = 0 collapses the momentum)")


@dataclass(frozen=True)
class HJState:
    """Reduced action and conjugate momentum with spatial derivatives."""

    s0: float
    p: float
    dp: float
    d2p: float


def _unwrap(scalar, *arrays):
    if scalar:
        vals = tuple(float(np.asarray(v).reshape(-1)[0]) for v in arrays)
        return vals[0] if len(vals) == 1 else vals
    return arrays[0] if len(arrays) == 1 else arrays


def conjugate_momentum(basis: BasisPair, consts: MicrostateConstants, x):
    """P = hbar*a*W / (phi2^2 + (a phi1 + b phi2)^2); sign(P) = sign(a*W)."""
    scalar = np.ndim(x) == 0
    p1, d1, p2, d2 = basis.eval(x)
    u = consts.a * p1 + consts.b * p2
    p = consts.a * basis.hbar * basis.wronskian_ref / (p2 * p2 + u * u)
    return _unwrap(scalar, p)


def momentum_arrays(basis, consts, params, spec, energy, xs, side=None):
    """(P, P', P'') over an array of positions, derivatives taken
    analytically with phi'' eliminated through the wave equation."""
    p1, d1, p2, d2 = basis.eval(xs)
    gamma = np.ascontiguousarray(
        np.broadcast_to(
            _gamma_coefficient(params, spec, energy, np.atleast_1d(xs), side=side), p1.shape
        ),
        dtype=np.float64,
    )
    return K.momentum_triplet(
        p1, d1, p2, d2, gamma, float(consts.a), float(consts.b),
        basis.hbar * basis.wronskian_ref,
    )


def _action_branch_arrays(basis, consts, xs):
    """(S0, branch_n) arrays; branch_n counts arctangent windows."""
    a, b, lam, hb = consts.a, consts.b, consts.lam, basis.hbar
    if basis.provenance == ANALYTIC_TRIG:
        frac = basis.rate * xs / math.pi
        n = np.rint(frac)
        psi = math.pi * (frac - n)
        s0 = hb * (np.arctan(a * np.tan(psi) + b) + math.pi * n * math.copysign(1.0, a) + lam)
        return s0, n.astype(np.int64)
    if basis.provenance == ANALYTIC_EXP:
        with np.errstate(over="ignore"):
            s0 = hb * (np.arctan(a * np.exp(2.0 * basis.rate * xs) + b) + lam)
        return s0, np.zeros(xs.shape, dtype=np.int64)
    return _action_branch_quadrature(basis, consts, xs)


def _action_branch_quadrature(basis, consts, xs):
    """Generic route: S0 by integrating P from a reference point, branch
    recovered from the arctangent afterwards."""
    a, b, lam, hb = consts.a, consts.b, consts.lam, basis.hbar
    x_ref = basis.domain[0]
    p1r, _, p2r, _ = (float(v[0]) for v in basis.eval(x_ref))
    if p2r == 0.0:
        raise ValueError("reference point sits on a phi2 zero; shift the domain edge")
    s_ref = hb * (math.atan(a * p1r / p2r + b) + lam)

    integrand = lambda x: conjugate_momentum(basis, consts, float(x))
    order = np.argsort(xs, kind="stable")
    s0 = np.empty_like(xs)
    prev_x, prev_s = x_ref, s_ref
    for idx in order:
        val, _ = quad(integrand, prev_x, xs[idx], epsabs=1e-13, epsrel=1e-12, limit=200)
        s0[idx] = prev_s + val
        prev_x, prev_s = xs[idx], s0[idx]

    p1, _, p2, _ = basis.eval(xs)
    with np.errstate(divide="ignore"):
        wrapped = np.arctan(np.where(p2 != 0.0, a * p1 / p2 + b, math.inf))
    n = np.rint((s0 / hb - lam - wrapped) / math.pi)
    return s0, n.astype(np.int64)


def reduced_action(basis: BasisPair, consts: MicrostateConstants, x):
    """Continuous reduced action S0(x) (branch-corrected arctangent form)."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    basis.eval(xs)  # domain check
    s0, _ = _action_branch_arrays(basis, consts, xs)
    return _unwrap(scalar, s0)


def action_and_branch(basis, consts, x):
    """(S0, branch_n); the integer window index accompanies each position."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    s0, n = _action_branch_arrays(basis, consts, xs)
    if scalar:
        return float(s0[0]), int(n[0])
    return s0, n


def momentum_derivatives(
    basis: BasisPair,
    consts: MicrostateConstants,
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    x,
    side: str | None = None,
) -> HJState:
    """Full HJ state (S0, P, P', P'') at x; fields are arrays when x is."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    p, dp, d2p = momentum_arrays(basis, consts, params, spec, energy, xs, side=side)
    s0, _ = _action_branch_arrays(basis, consts, xs)
    if scalar:
        return HJState(float(s0[0]), float(p[0]), float(dp[0]), float(d2p[0]))
    return HJState(s0, p, dp, d2p)


def qshje_residual(
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    state: HJState,
    x,
    side: str | None = None,
):
    """Stationary HJ residual at x, in natural units (dimensionless).

    Vanishes (to rounding) for any momentum built from a valid solution
    pair with a != 0, in both modes.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    v, _, _ = spec.evaluate(xs, side=side)
    e0 = params.rest_energy
    scale_p = params.momentum_scale
    scale_dp = scale_p / params.length_scale
    p = np.ascontiguousarray(np.atleast_1d(state.p) / scale_p, dtype=np.float64)
    dp = np.ascontiguousarray(np.atleast_1d(state.dp) / scale_dp, dtype=np.float64)
    d2p = np.ascontiguousarray(
        np.atleast_1d(state.d2p) / (scale_dp / params.length_scale), dtype=np.float64
    )
    eps_hat = np.ascontiguousarray(np.broadcast_to((energy - v) / e0, p.shape), dtype=np.float64)
    if params.relativistic:
        res = K.qshje_residual_rel(p, dp, d2p, eps_hat)
    else:
        res = K.qshje_residual_nonrel(p, dp, d2p, eps_hat)
    return _unwrap(scalar, res)
