"""Law of motion, time-of-flight quadrature, trajectory construction and
the conservation-law residual.

The velocity law xdot * P = (E-V) - m^2 c^4/(E-V) is a first-order
equation, but trajectories are built by quadrature-then-inversion of the
monotone map t(x) rather than by stepping xdot(t): the instantaneous
velocity can exceed c and varies violently near the trajectory nodes,
whereas dt/dx = P*(E-V)/((E-V)^2 - m^2c^4) is smooth and of one sign on any
pole-free region.  Inversion is a bracketed root-find on the dense output
of the integrated map, so time-of-flight (independent adaptive quadrature)
and the trajectory agree to solver tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from . import _kernels as K
from .basis import ANALYTIC_EXP, ANALYTIC_TRIG, BasisPair
from .errors import (
    AtDiscontinuityError,
    ClassicallyForbiddenError,
    QuadratureError,
    TurningInIntervalError,
    TurningPointError,
    ZeroEpsilonError,
)
from .hj import MicrostateConstants, momentum_arrays, _action_branch_arrays
from .model import (
    DEFAULT_TURNING_TOL,
    PhysicalParams,
    PiecewiseConstant,
    Potential,
    RegionClass,
    Tabulated,
    region_of_epsilon,
)


@dataclass(frozen=True)
class KinematicState:
    """Position with velocity, acceleration and jerk (and optionally the
    time it was sampled at)."""

    x: float
    xd: float
    xdd: float
    xddd: float
    t: float | None = None


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    x: float
    v: float
    p: float
    s0: float
    qshje_residual: float
    firqnl_residual: float
    branch_n: int


@dataclass(frozen=True)
class BoundaryEvent:
    """Marker for a trajectory that hit a boundary of validity."""

    kind: str  # "turning" | "pole" | "segment_edge" | "domain_edge" | "horizon"
    t: float
    x: float
    detail: str = ""


@dataclass
class TrajectoryResult:
    samples: list[TrajectorySample]
    event: BoundaryEvent | None = None


def _check_epsilon(params, eps, tol_turning):
    e0 = params.rest_energy
    if params.relativistic:
        if abs(eps * eps - e0 * e0) <= tol_turning * e0 * e0:
            raise TurningPointError(
                f"eps={eps!r} is a turning value: velocity is exactly zero there"
            )
        if abs(eps) <= tol_turning * e0:
            raise ZeroEpsilonError(f"eps={eps!r}: pole of the relativistic velocity law")
    else:
        if abs(eps) <= tol_turning * e0:
            raise TurningPointError(f"eps={eps!r} is a turning value (zero velocity)")


def velocity_law(
    params: PhysicalParams, energy: float, v_pot, p, tol_turning: float = DEFAULT_TURNING_TOL
):
    """Velocity from the fundamental relation.

    Relativistic: xdot = [(E-V) - m^2c^4/(E-V)] / P.  Non-relativistic:
    xdot = 2 (E-V)/P.  Turning values and (relativistically) the E-V = 0
    pole are refused rather than silently evaluated.
    """
    eps = np.asarray(energy, dtype=float) - np.asarray(v_pot, dtype=float)
    scalar = eps.ndim == 0 and np.ndim(p) == 0
    for e in np.atleast_1d(eps):
        _check_epsilon(params, float(e), tol_turning)
    if params.relativistic:
        e0 = params.rest_energy
        out = (eps - e0 * e0 / eps) / p
    else:
        out = 2.0 * eps / p
    return float(out) if scalar else out


def _g_arrays(params, spec, energy, xs, side=None):
    """Velocity-law numerator g(x) = xdot*P and its two derivatives."""
    v, dv, d2v = spec.evaluate(xs, side=side)
    if params.relativistic:
        e0sq = params.rest_energy ** 2
        eps = energy - v
        g = eps - e0sq / eps
        dg = -dv * (1.0 + e0sq / (eps * eps))
        d2g = -d2v * (1.0 + e0sq / (eps * eps)) - 2.0 * e0sq * dv * dv / eps**3
    else:
        g = 2.0 * (energy - v)
        dg = -2.0 * dv
        d2g = -2.0 * d2v
    return g, dg, d2g, v, dv, d2v


def _c(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def _kinematics_arrays(basis, consts, params, spec, energy, xs, side=None):
    p, dp, d2p = momentum_arrays(basis, consts, params, spec, energy, xs, side=side)
    g, dg, d2g, v, dv, d2v = _g_arrays(params, spec, energy, xs, side=side)
    shape = p.shape
    xd, xdd, xddd = K.kinematics_triplet(
        p, dp, d2p,
        _c(np.broadcast_to(g, shape)), _c(np.broadcast_to(dg, shape)),
        _c(np.broadcast_to(d2g, shape)),
    )
    return p, dp, d2p, xd, xdd, xddd, v, dv, d2v


def kinematics(
    basis: BasisPair,
    consts: MicrostateConstants,
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    x,
    side: str | None = None,
    tol_turning: float = DEFAULT_TURNING_TOL,
) -> KinematicState:
    """Self-consistent (xdot, xddot, jerk) at x from the analytic momentum
    derivatives, via xddot = xdot d(xdot)/dx and its repeat."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    v, _, _ = spec.evaluate(xs, side=side)
    for e in np.atleast_1d(energy - v):
        _check_epsilon(params, float(e), tol_turning)
    _, _, _, xd, xdd, xddd, _, _, _ = _kinematics_arrays(
        basis, consts, params, spec, energy, xs, side=side
    )
    if scalar:
        return KinematicState(float(xs[0]), float(xd[0]), float(xdd[0]), float(xddd[0]))
    return KinematicState(xs, xd, xdd, xddd)


def firqnl_residual(params: PhysicalParams, spec: Potential, energy: float, kin: KinematicState):
    """Scaled conservation-law residual at the kinematic state.

    Relativistic: the third-order first integral divided by (mc^2)^8.
    Non-relativistic: its limit form divided by E^4.  Both are evaluated in
    natural units so the enormous intermediate powers stay O(1).
    """
    scalar = np.ndim(kin.x) == 0
    xs = np.atleast_1d(np.asarray(kin.x, dtype=float))
    v, dv, d2v = spec.evaluate(xs)
    e0 = params.rest_energy
    c = params.light_speed
    t0 = params.time_scale
    l0 = params.length_scale
    xd = _c(np.atleast_1d(kin.xd) / c)
    xdd = _c(np.atleast_1d(kin.xdd) * t0 / c)
    xddd = _c(np.atleast_1d(kin.xddd) * t0 * t0 / c)
    shape = xd.shape
    dv_h = _c(np.broadcast_to(dv * l0 / e0, shape))
    d2v_h = _c(np.broadcast_to(d2v * l0 * l0 / e0, shape))
    if params.relativistic:
        eps_h = _c(np.broadcast_to((energy - v) / e0, shape))
        res = K.firqnl_residual_rel(xd, xdd, xddd, eps_h, dv_h, d2v_h)
    else:
        if energy == 0.0:
            raise ValueError("non-relativistic residual is normalized by E^4; E must be nonzero")
        u_h = _c(np.broadcast_to((energy - v) / e0, shape))
        res = K.fiqnl_residual_nonrel(xd, xdd, xddd, u_h, dv_h, d2v_h, (energy / e0) ** 4)
    return float(res[0]) if scalar else res


def classical_reference(params: PhysicalParams, energy: float, v_pot: float):
    """Classical velocity and conjugate momentum at potential value v_pot."""
    eps = energy - float(v_pot)
    if params.relativistic:
        e0 = params.rest_energy
        s = eps * eps - e0 * e0
        if s < 0.0:
            raise ClassicallyForbiddenError(
                f"eps^2={eps * eps!r} < (mc^2)^2: no classical motion here"
            )
        if eps == 0.0:
            raise ZeroEpsilonError("eps = 0 has no classical counterpart")
        xd = params.light_speed * math.sqrt(s) / eps
        p = math.sqrt(s) / params.light_speed * math.copysign(1.0, eps)
        return xd, p
    if eps < 0.0:
        raise ClassicallyForbiddenError(f"eps={eps!r} < 0: no classical motion here")
    xd = math.sqrt(2.0 * eps / params.mass)
    return xd, params.mass * xd


# ---------------------------------------------------------------------------
# time map: quadrature of dt/dx and its inversion
# ---------------------------------------------------------------------------


def _eval_potential_robust(spec, x, lo, hi):
    """Potential at x with a side hint toward the interior of (lo, hi)."""
    try:
        return spec.evaluate(x)
    except AtDiscontinuityError:
        side = "right" if abs(x - lo) <= abs(x - hi) else "left"
        return spec.evaluate(x, side=side)


def _scalar_momentum(basis, consts):
    """Cheap scalar P(x) closure (hot path of the time map)."""
    a, b = consts.a, consts.b
    hw = basis.hbar * basis.wronskian_ref
    if basis.provenance == ANALYTIC_TRIG:
        k = basis.rate

        def p_of(x):
            s = math.sin(k * x)
            c = math.cos(k * x)
            u = a * s + b * c
            return a * hw / (c * c + u * u)

        return p_of
    if basis.provenance == ANALYTIC_EXP:
        kap = basis.rate

        def p_of(x):
            # Two algebraically equal forms, each overflow-free on its side.
            if x <= 0.0:
                y = math.exp(2.0 * kap * x)
                return a * hw * y / (1.0 + (a * y + b) ** 2)
            z = math.exp(-2.0 * kap * x)
            return a * hw * z / (z * z + (a + b * z) ** 2)

        return p_of

    def p_of(x):
        p1, _, p2, _ = basis.eval(x)
        u = a * p1[0] + b * p2[0]
        return a * hw / (p2[0] * p2[0] + u * u)

    return p_of


def _scalar_potential(spec, lo, hi):
    """Cheap scalar V(x) closure over (lo, hi); assumes no breakpoints
    strictly inside for the piecewise case."""
    if isinstance(spec, PiecewiseConstant) and not spec.breakpoints_in(lo, hi):
        probe = 0.5 * (max(lo, -1e300) + min(hi, 1e300))
        probe = min(max(probe, lo), hi)
        v0, _, _ = _eval_potential_robust(spec, probe, lo, hi)
        return lambda x, _v=float(v0): _v
    if isinstance(spec, Tabulated):
        spline = spec._spline
        return lambda x: float(spline(x))
    return lambda x: float(_eval_potential_robust(spec, float(x), lo, hi)[0])


def _time_integrand(basis, consts, params, spec, energy, lo, hi):
    e0sq = params.rest_energy ** 2
    p_of = _scalar_momentum(basis, consts)
    v_of = _scalar_potential(spec, lo, hi)
    if params.relativistic:

        def theta(x):
            eps = energy - v_of(x)
            return p_of(x) * eps / (eps * eps - e0sq)

        return theta

    def theta(x):
        return p_of(x) / (2.0 * (energy - v_of(x)))

    return theta


def _scan_interval(params, spec, energy, lo, hi, tol_turning=DEFAULT_TURNING_TOL):
    """Refuse intervals containing turning points or velocity-law poles;
    return interior potential breakpoints for the quadrature."""
    e0 = params.rest_energy
    if isinstance(spec, PiecewiseConstant):
        breaks = spec.breakpoints_in(lo, hi)
        probes = [0.5 * (a + b) for a, b in zip([lo] + breaks, breaks + [hi])]
        for xp in probes:
            v, _, _ = spec.evaluate(xp)
            eps = energy - v
            if region_of_epsilon(params, eps, tol_turning) is RegionClass.TURNING:
                raise TurningInIntervalError(f"turning segment around x={xp!r}")
            if params.relativistic and abs(eps) <= tol_turning * e0:
                raise ZeroEpsilonError(f"(E-V) vanishes on the segment around x={xp!r}")
        return breaks
    grid = np.linspace(lo, hi, 513)
    v, _, _ = spec.evaluate(grid)
    eps = energy - v
    if params.relativistic:
        s = eps * eps - e0 * e0
        if np.any(np.abs(s) <= tol_turning * e0 * e0) or np.any(s[:-1] * s[1:] < 0.0):
            raise TurningInIntervalError("turning point inside the flight interval")
        if np.any(np.abs(eps) <= tol_turning * e0) or np.any(eps[:-1] * eps[1:] < 0.0):
            raise ZeroEpsilonError("(E-V) vanishes inside the flight interval")
    else:
        if np.any(np.abs(eps) <= tol_turning * e0) or np.any(eps[:-1] * eps[1:] < 0.0):
            raise TurningInIntervalError("turning point inside the flight interval")
    return []


def time_of_flight(
    basis: BasisPair,
    consts: MicrostateConstants,
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    x_from: float,
    x_to: float,
    rtol: float = 1e-12,
    atol: float = 1e-14,
):
    """t(x_to) - t(x_from) by adaptive quadrature of dt/dx.

    Negative when x_to lies behind the direction of motion.  The interval
    must be free of turning points and velocity-law poles.
    """
    x_from = float(x_from)
    x_to = float(x_to)
    if x_from == x_to:
        return 0.0
    lo, hi = min(x_from, x_to), max(x_from, x_to)
    breaks = _scan_interval(params, spec, energy, lo, hi)
    theta = _time_integrand(basis, consts, params, spec, energy, lo, hi)
    out = quad(
        theta, x_from, x_to, points=sorted(breaks) if breaks else None,
        epsabs=atol, epsrel=rtol, limit=400, full_output=1,
    )
    val, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(f"{out[3]} (achieved error {abserr:.3e})")
    if abserr > 50.0 * (atol + rtol * abs(val)) + 1e-13 * abs(val):
        raise QuadratureError(f"requested tolerance not met (achieved error {abserr:.3e})")
    return val


def _trajectory_limits(basis, params, spec, energy, x0, tol_turning=DEFAULT_TURNING_TOL):
    """Allowed open interval around x0 plus the boundary event at each end."""
    lo, hi = basis.domain
    lo = max(lo, spec.bounds[0])
    hi = min(hi, spec.bounds[1])
    ev_lo = ev_hi = None
    if isinstance(spec, PiecewiseConstant):
        for a, b, _v in spec.segments:
            if a <= x0 <= b:
                if a > lo:
                    lo, ev_lo = a, "segment_edge"
                if b < hi:
                    hi, ev_hi = b, "segment_edge"
                break
    elif isinstance(spec, Tabulated):
        e0 = params.rest_energy
        grid = np.linspace(lo, hi, 2049)
        v, _, _ = spec.evaluate(grid)
        eps = energy - v

        def first_zero(fvals, exact, side):
            # bracket on the sampled values, then refine on the true function
            idx = np.nonzero(fvals[:-1] * fvals[1:] < 0.0)[0]
            if side == "hi":
                cand = [i for i in idx if grid[i] >= x0]
                if not cand:
                    return None
                i = cand[0]
            else:
                cand = [i for i in idx if grid[i + 1] <= x0]
                if not cand:
                    return None
                i = cand[-1]
            return brentq(exact, grid[i], grid[i + 1], xtol=1e-13)

        def eps_of(x):
            return energy - spec.evaluate(float(x))[0]

        if params.relativistic:
            s = eps * eps - e0 * e0
            for side in ("lo", "hi"):
                zt = first_zero(s, lambda x: eps_of(x) ** 2 - e0 * e0, side)
                zp = first_zero(eps, eps_of, side)
                cands = [(zt, "turning"), (zp, "pole")]
                cands = [(z, k) for z, k in cands if z is not None]
                if not cands:
                    continue
                z, kind = min(cands, key=lambda c: abs(c[0] - x0))
                # dt/dx has a 1/(x-z) pole at a turning point (the particle
                # never reaches it); stop a little short of it.
                margin = (1e-6 if kind == "turning" else 1e-9) * max(1.0, abs(z))
                if side == "hi" and z - margin < hi:
                    hi, ev_hi = z - margin, kind
                elif side == "lo" and z + margin > lo:
                    lo, ev_lo = z + margin, kind
        else:
            for side in ("lo", "hi"):
                zt = first_zero(eps, eps_of, side)
                if zt is None:
                    continue
                margin = 1e-9 * max(1.0, abs(zt))
                if side == "hi" and zt - margin < hi:
                    hi, ev_hi = zt - margin, "turning"
                elif side == "lo" and zt + margin > lo:
                    lo, ev_lo = zt + margin, "turning"
    if ev_lo is None and math.isfinite(lo):
        ev_lo = "domain_edge"
    if ev_hi is None and math.isfinite(hi):
        ev_hi = "domain_edge"
    return lo, hi, ev_lo, ev_hi


class _TimeMap:
    """Monotone map t(x) integrated outward from the anchor (x0, t0)."""

    MAX_CHUNKS = 256

    def __init__(self, theta, x0, t0, lo, hi, ev_lo, ev_hi, char_len, rtol=1e-11, atol=1e-13):
        self.theta = theta
        self.x0, self.t0 = x0, t0
        self.lo, self.hi = lo, hi
        self.ev_lo, self.ev_hi = ev_lo, ev_hi
        self.rtol, self.atol = rtol, atol
        self.chunk = 6.0 * char_len
        self.direction = 1.0 if theta(x0) > 0.0 else -1.0
        self.segs = []  # (t_a, t_b, x_a, x_b, sol), ordered by t
        self._head = (x0, t0)  # future side of the motion
        self._tail = (x0, t0)  # past side
        self._head_stop = None  # BoundaryEvent kind once exhausted
        self._tail_stop = None
        self._n_chunks = 0

    def _limit(self, forward):
        going_up = (self.direction > 0) == forward
        return (self.hi, self.ev_hi) if going_up else (self.lo, self.ev_lo)

    def _extend(self, forward):
        x_cur, t_cur = self._head if forward else self._tail
        limit, ev = self._limit(forward)
        step = self.chunk * self.direction * (1.0 if forward else -1.0)
        x_next = x_cur + step
        x_next = min(x_next, limit) if step > 0 else max(x_next, limit)
        if x_next == x_cur:
            if forward:
                self._head_stop = ev or "domain_edge"
            else:
                self._tail_stop = ev or "domain_edge"
            return False
        sol = solve_ivp(
            lambda x, y: (self.theta(x),), (x_cur, x_next), (t_cur,),
            method="DOP853", dense_output=True, rtol=self.rtol, atol=self.atol,
        )
        if not sol.success:
            if "step size" in sol.message.lower():
                # Stalled against a singular boundary: keep what we have.
                if forward:
                    self._head_stop = ev or "horizon"
                else:
                    self._tail_stop = ev or "horizon"
                return False
            raise QuadratureError(f"time-map integration failed: {sol.message}")
        t_next = float(sol.y[0][-1])
        if abs(t_next - t_cur) < self.atol:
            # Time has stopped accumulating: the trajectory's time horizon.
            if forward:
                self._head_stop = "horizon"
            else:
                self._tail_stop = "horizon"
            return False
        dense = sol.sol
        seg = (
            min(t_cur, t_next), max(t_cur, t_next),
            min(x_cur, x_next), max(x_cur, x_next),
            lambda x, _d=dense: float(_d(x)[0]),
        )
        if forward:
            self.segs.append(seg)
            self._head = (x_next, t_next)
        else:
            self.segs.insert(0, seg)
            self._tail = (x_next, t_next)
        self._n_chunks += 1
        return True

    def _covered(self, t):
        return self._tail[1] <= t <= self._head[1]

    def locate(self, t):
        """x at time t, or a BoundaryEvent when t is beyond a boundary."""
        while not self._covered(t):
            forward = t > self._head[1]
            stop = self._head_stop if forward else self._tail_stop
            if stop is not None:
                x_b, t_b = self._head if forward else self._tail
                return BoundaryEvent(stop, t_b, x_b, f"requested t={t!r} is beyond the boundary")
            if self._n_chunks >= self.MAX_CHUNKS:
                x_b, t_b = self._head if forward else self._tail
                return BoundaryEvent(
                    "horizon", t_b, x_b,
                    "time map stopped expanding (time horizon of this trajectory)",
                )
            self._extend(forward)
        if t == self._tail[1]:
            return self._tail[0]
        if t == self._head[1]:
            return self._head[0]
        for t_a, t_b, x_a, x_b, f in self.segs:
            if t_a <= t <= t_b:
                fa = f(x_a) - t
                fb = f(x_b) - t
                if fa == 0.0:
                    return x_a
                if fb == 0.0:
                    return x_b
                if fa * fb > 0.0:  # t matches an endpoint to rounding
                    return x_a if abs(fa) < abs(fb) else x_b
                return brentq(lambda x: f(x) - t, x_a, x_b, xtol=1e-14, rtol=8.9e-16)
        raise RuntimeError("time map bookkeeping error")  # pragma: no cover

def _default_anchor(basis, consts):
    if consts.x0 is not None:
        return consts.x0
    if basis.provenance == ANALYTIC_TRIG:
        return math.atan(-consts.b / consts.a) / basis.rate
    raise ValueError(
        "x0 is required for this basis (no natural anchor away from the oscillatory case)"
    )


def _char_length(basis, params, spec, energy, x0):
    if basis.rate:
        return math.pi / basis.rate
    v, _, _ = _eval_potential_robust(spec, x0, *basis.domain)
    e0 = params.rest_energy
    if params.relativistic:
        g = abs((energy - v) ** 2 - e0 * e0) / (params.hbar * params.light_speed) ** 2
    else:
        g = 2.0 * params.mass * abs(energy - v) / params.hbar**2
    k = math.sqrt(g)
    if k > 0.0:
        return math.pi / k
    return max(1.0, abs(basis.domain[1] - basis.domain[0]) / 16.0)


def integrate_trajectory(
    basis: BasisPair,
    consts: MicrostateConstants,
    params: PhysicalParams,
    spec: Potential,
    energy: float,
    t_span: tuple[float, float],
    samples: int = 201,
) -> TrajectoryResult:
    """Trajectory samples on a uniform time grid over t_span.

    Built by inverting the integrated monotone map t(x) anchored at
    (t0, x0).  When the trajectory hits a turning point, a velocity-law
    pole, or the edge of the basis/potential domain, the output is
    truncated there and the boundary is reported in ``event``.
    """
    t_a, t_b = float(t_span[0]), float(t_span[1])
    x0 = _default_anchor(basis, consts)
    lo, hi, ev_lo, ev_hi = _trajectory_limits(basis, params, spec, energy, x0)
    if not lo <= x0 <= hi:
        raise ValueError(f"x0={x0!r} outside the usable interval ({lo}, {hi})")
    theta = _time_integrand(basis, consts, params, spec, energy, lo, hi)
    char = _char_length(basis, params, spec, energy, x0)
    tmap = _TimeMap(theta, x0, consts.t0, lo, hi, ev_lo, ev_hi, char)

    if t_a == t_b:
        times = np.array([t_a])
    else:
        if samples < 2:
            raise ValueError("samples must be >= 2 for a non-degenerate t_span")
        times = np.linspace(t_a, t_b, samples)

    xs = []
    event = None
    for t in times:
        res = tmap.locate(float(t))
        if isinstance(res, BoundaryEvent):
            event = res
            break
        xs.append(res)
    times = times[: len(xs)]
    if not xs:
        return TrajectoryResult([], event)

    xarr = np.asarray(xs)
    p, dp, d2p, xd, xdd, xddd, v, dv, d2v = _kinematics_arrays(
        basis, consts, params, spec, energy, xarr
    )
    s0, branch = _action_branch_arrays(basis, consts, xarr)

    from .hj import HJState, qshje_residual

    q_res = qshje_residual(params, spec, energy, HJState(s0, p, dp, d2p), xarr)
    f_res = firqnl_residual(params, spec, energy, KinematicState(xarr, xd, xdd, xddd))
    out = [
        TrajectorySample(
            float(times[i]), float(xarr[i]), float(xd[i]), float(p[i]), float(s0[i]),
            float(np.atleast_1d(q_res)[i]), float(np.atleast_1d(f_res)[i]), int(branch[i]),
        )
        for i in range(len(xs))
    ]
    return TrajectoryResult(out, event)
