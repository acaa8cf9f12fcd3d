"""Physical parameters, potential definitions and region classification.

Everything here is immutable and pure; the rest of the package builds on
these types.  Internal computations elsewhere rescale energies by mc^2,
lengths by hbar/mc and times by hbar/mc^2 so that residual tolerances are
unit-free; the scale factors live on :class:`PhysicalParams`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AtDiscontinuityError, OutOfDomainError

RELATIVISTIC = "relativistic"
NON_RELATIVISTIC = "non_relativistic"

#: Relative half-width of the turning neighborhood, |eps^2 - (mc^2)^2|
#: <= tol * (mc^2)^2.  Configurable per call; this is the package default.
DEFAULT_TURNING_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Particle mass, light speed, Planck constant and the equation mode."""

    mass: float = 1.0
    light_speed: float = 1.0
    hbar: float = 1.0
    mode: str = RELATIVISTIC

    def __post_init__(self):
        if not (self.mass > 0.0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (self.light_speed > 0.0):
            raise ValueError(f"light_speed must be positive, got {self.light_speed}")
        if not (self.hbar > 0.0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.mode not in (RELATIVISTIC, NON_RELATIVISTIC):
            raise ValueError(
                f"mode must be {RELATIVISTIC!r} or {NON_RELATIVISTIC!r}, got {self.mode!r}"
            )

    @property
    def relativistic(self) -> bool:
        return self.mode == RELATIVISTIC

    # Natural-unit scale factors.
    @property
    def rest_energy(self) -> float:
        return self.mass * self.light_speed**2

    @property
    def length_scale(self) -> float:
        return self.hbar / (self.mass * self.light_speed)

    @property
    def time_scale(self) -> float:
        return self.hbar / self.rest_energy

    @property
    def momentum_scale(self) -> float:
        return self.mass * self.light_speed


class RegionClass(enum.Enum):
    """Kinematic regime of a point, by (E-V)^2 against (m c^2)^2."""

    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"
    TURNING = "turning"


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


class Potential:
    """Base class for 1D stationary potentials.

    Subclasses implement :meth:`evaluate` returning ``(V, dV/dx, d2V/dx2)``
    elementwise and expose ``bounds`` as the closed domain of definition.
    """

    bounds: tuple[float, float] = (-math.inf, math.inf)

    def evaluate(self, x, side: str | None = None):
        raise NotImplementedError

    def breakpoints_in(self, lo: float, hi: float) -> list[float]:
        """Interior discontinuity locations within (lo, hi); none by default."""
        return []


class PiecewiseConstant(Potential):
    """Contiguous constant segments ``(x_left, x_right, value)``.

    Outer edges may be infinite.  Evaluation exactly on an interior segment
    boundary requires a ``side`` hint, otherwise it is refused.
    """

    def __init__(self, segments: Sequence[tuple[float, float, float]]):
        segs = [(float(a), float(b), float(v)) for a, b, v in segments]
        if not segs:
            raise ValueError("at least one segment required")
        for a, b, _ in segs:
            if not a < b:
                raise ValueError(f"segment ({a}, {b}) is empty or inverted")
        for (_, b0, _), (a1, _, _) in zip(segs, segs[1:]):
            if b0 != a1:
                raise ValueError(
                    f"segments must be contiguous and non-overlapping; gap/overlap at {b0} vs {a1}"
                )
        self.segments = tuple(segs)
        self.bounds = (segs[0][0], segs[-1][1])
        # Interior boundaries only; outer edges are domain edges.
        self._edges = np.array([s[0] for s in segs[1:]])
        self._values = np.array([s[2] for s in segs])

    def breakpoints_in(self, lo, hi):
        return [float(e) for e in self._edges if lo < e < hi]

    def evaluate(self, x, side=None):
        xs, scalar = _as_float_array(x)
        lo, hi = self.bounds
        if np.any(xs < lo) or np.any(xs > hi):
            bad = xs[(xs < lo) | (xs > hi)]
            raise OutOfDomainError(
                f"x={np.atleast_1d(bad)[0]!r} outside potential domain [{lo}, {hi}]"
            )
        if side is None:
            hit = np.isin(xs, self._edges)
            if np.any(hit):
                xbad = np.atleast_1d(xs[hit])[0]
                raise AtDiscontinuityError(
                    f"x={xbad!r} lies on a segment boundary; evaluate with side='left' or side='right'"
                )
            idx = np.searchsorted(self._edges, xs, side="right")
        elif side == "left":
            idx = np.searchsorted(self._edges, xs, side="left")
        elif side == "right":
            idx = np.searchsorted(self._edges, xs, side="right")
        else:
            raise ValueError(f"side must be None, 'left' or 'right', got {side!r}")
        v = self._values[idx]
        z = np.zeros_like(v)
        if scalar:
            return float(v), 0.0, 0.0
        return v, z, z.copy()


class RectangularBarrier(PiecewiseConstant):
    """Barrier of the given height on [0, width], zero outside."""

    def __init__(self, height: float, width: float):
        if not width > 0:
            raise ValueError(f"width must be positive, got {width}")
        super().__init__(
            [(-math.inf, 0.0, 0.0), (0.0, float(width), float(height)), (float(width), math.inf, 0.0)]
        )
        self.height = float(height)
        self.width = float(width)


class Tabulated(Potential):
    """Cubic-spline interpolation of sampled values on a strictly increasing
    grid of at least 4 points, so that d2V/dx2 exists and is continuous."""

    def __init__(self, x: Sequence[float], v: Sequence[float]):
        xg = np.asarray(x, dtype=float)
        vg = np.asarray(v, dtype=float)
        if xg.ndim != 1 or xg.shape != vg.shape:
            raise ValueError("x and v must be 1D arrays of equal length")
        if xg.size < 4:
            raise ValueError(f"need at least 4 samples, got {xg.size}")
        if not np.all(np.diff(xg) > 0):
            raise ValueError("grid must be strictly increasing")
        self.grid = xg
        self.values = vg
        self.bounds = (float(xg[0]), float(xg[-1]))
        self._spline = CubicSpline(xg, vg, extrapolate=False)
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def evaluate(self, x, side=None):
        xs, scalar = _as_float_array(x)
        lo, hi = self.bounds
        if np.any(xs < lo) or np.any(xs > hi):
            bad = np.atleast_1d(xs[(xs < lo) | (xs > hi)])[0]
            raise OutOfDomainError(f"x={bad!r} outside tabulated range [{lo}, {hi}]")
        v = self._spline(xs)
        d1 = self._d1(xs)
        d2 = self._d2(xs)
        if scalar:
            return float(v), float(d1), float(d2)
        return v, d1, d2


def uniform_potential(value: float = 0.0) -> PiecewiseConstant:
    """Constant potential over the whole line."""
    return PiecewiseConstant([(-math.inf, math.inf, float(value))])


def eval_potential(spec: Potential, x, side: str | None = None):
    """Potential value and its first two derivatives at ``x``.

    For piecewise-constant specs the derivatives are exactly zero at
    interior points; exact boundary hits raise unless ``side`` is given.
    """
    return spec.evaluate(x, side=side)


@dataclass(frozen=True)
class EnergyContext:
    """Total energy bundled with its local and non-relativistic views.

    ``epsilon`` is recomputed from the potential on every call rather than
    cached, so it can never go stale against the spec.
    """

    params: PhysicalParams
    energy: float
    spec: Potential

    def epsilon(self, x, side: str | None = None):
        v, _, _ = self.spec.evaluate(x, side=side)
        return self.energy - v

    @property
    def nonrel_energy(self) -> float:
        return self.energy - self.params.rest_energy


def region_of_epsilon(
    params: PhysicalParams, epsilon: float, tol_turning: float = DEFAULT_TURNING_TOL
) -> RegionClass:
    """Classify a local energy value.

    Relativistic mode compares eps^2 with (mc^2)^2; non-relativistic mode
    compares eps with 0.  The turning band is relative to (mc^2)^2
    (respectively mc^2), which is the only intrinsic scale available.
    """
    e0 = params.rest_energy
    if params.relativistic:
        s = epsilon * epsilon - e0 * e0
        if abs(s) <= tol_turning * e0 * e0:
            return RegionClass.TURNING
        return RegionClass.PROPAGATING if s > 0 else RegionClass.EVANESCENT
    if abs(epsilon) <= tol_turning * e0:
        return RegionClass.TURNING
    return RegionClass.PROPAGATING if epsilon > 0 else RegionClass.EVANESCENT


def classify_point(
    params: PhysicalParams,
    energy: float,
    spec: Potential,
    x,
    side: str | None = None,
    tol_turning: float = DEFAULT_TURNING_TOL,
) -> RegionClass:
    """Region of the point ``x`` for total energy ``energy``."""
    v, _, _ = eval_potential(spec, x, side=side)
    return region_of_epsilon(params, energy - v, tol_turning)
