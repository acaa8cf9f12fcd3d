"""Traversal delay through a rectangular barrier and its thin/thick
asymptotics, with the non-relativistic comparison.

The exact delay comes from the forbidden-regime motion between the barrier
faces; its thick-barrier limit is independent of the width (saturation).
The formulas keep the delay positive only under the sign convention
a < 0 for 0 < eps < mc^2 and a > 0 for -mc^2 < eps < 0, which is enforced
rather than reinterpreted.  How the constants inside the barrier relate to
constants outside is not modeled: (a, b) inside are taken as given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .basis import constant_basis
from .errors import (
    NotEvanescentError,
    RqtrajError,
    SignConventionError,
    TurningPointError,
    ZeroEpsilonError,
)
from .hj import MicrostateConstants
from .model import PhysicalParams, RectangularBarrier, RegionClass, region_of_epsilon

THIN_MAX = 0.1
THICK_MIN = 10.0


@dataclass(frozen=True)
class TunnelingReport:
    """Exact and asymptotic delays for one barrier configuration.

    ``thinness`` is xi = sqrt(m^2c^4 - eps^2) * q / (hbar c); the regime
    label is thin for xi <= 0.1, thick for xi >= 10, else intermediate.
    """

    q: float
    epsilon: float
    a: float
    b: float
    t_exact: float
    t_thin: float
    t_thick: float
    regime: str
    thinness: float


@dataclass(frozen=True)
class NonRelDelayComparison:
    """Relativistic delays evaluated at eps = eps_nr + mc^2, side by side
    with their leading non-relativistic approximants."""

    relativistic: TunnelingReport
    epsilon_nr: float
    t_exact_nr: float
    t_thin_nr: float
    t_thick_nr: float


def _regime(xi: float) -> str:
    if xi <= THIN_MAX:
        return "thin"
    if xi >= THICK_MIN:
        return "thick"
    return "intermediate"


def _arctan_face(a: float, b: float, two_kappa_q: float) -> float:
    # atan(a * e^{2 kappa q} + b); saturates at sign(a)*pi/2 long before the
    # exponential overflows.
    if two_kappa_q > 500.0:
        return math.copysign(0.5 * math.pi, a)
    return math.atan(a * math.exp(two_kappa_q) + b)


def _delay_triplet(params, epsilon, a, b, q, thick_sign):
    """(t_exact, t_thin, t_thick, xi) for local energy epsilon inside the
    barrier; thick_sign is the sign of the saturated pi/2 term."""
    e0 = params.rest_energy
    s = e0 * e0 - epsilon * epsilon
    kappa = math.sqrt(s) / (params.hbar * params.light_speed)
    xi = kappa * q
    pref = params.hbar * epsilon / (epsilon * epsilon - e0 * e0)
    t_exact = pref * (_arctan_face(a, b, 2.0 * kappa * q) - math.atan(a + b))
    t_thin = -2.0 * a * epsilon * q / (
        params.light_speed * (1.0 + (a + b) ** 2) * math.sqrt(s)
    )
    t_thick = pref * (thick_sign * 0.5 * math.pi - math.atan(a + b))
    return t_exact, t_thin, t_thick, xi


def barrier_delay(
    params: PhysicalParams,
    barrier: RectangularBarrier,
    energy: float,
    consts: MicrostateConstants,
    cross_check: bool = True,
    cross_check_tol: float = 1e-8,
) -> TunnelingReport:
    """Delay T(q) = t(q) - t(0) for tunneling through the barrier.

    Requires 0 < |eps| < mc^2 inside the barrier (eps = E - V0) and the
    sign convention on ``a`` that makes the delay positive.  The exact
    value is cross-checked against the independent time-of-flight
    quadrature through the forbidden-regime basis unless ``cross_check``
    is disabled.
    """
    if not params.relativistic:
        raise ValueError("barrier delay formulas are relativistic-mode only")
    eps = energy - barrier.height
    e0 = params.rest_energy
    if abs(eps) <= 1e-300:
        raise ZeroEpsilonError("E - V0 = 0 inside the barrier")
    if region_of_epsilon(params, eps) is not RegionClass.EVANESCENT:
        raise NotEvanescentError(
            f"(E-V0)^2 = {eps * eps!r} is not below (mc^2)^2 = {e0 * e0!r}"
        )
    a, b = consts.a, consts.b
    if (eps > 0.0 and a >= 0.0) or (eps < 0.0 and a <= 0.0):
        raise SignConventionError(
            f"need a < 0 for 0 < eps < mc^2 and a > 0 for -mc^2 < eps < 0; got a={a!r}, eps={eps!r}"
        )
    thick_sign = -1.0 if eps > 0.0 else 1.0
    t_exact, t_thin, t_thick, xi = _delay_triplet(params, eps, a, b, barrier.width, thick_sign)
    report = TunnelingReport(
        barrier.width, eps, a, b, t_exact, t_thin, t_thick, _regime(xi), xi
    )
    if cross_check:
        from .dynamics import time_of_flight

        pair = constant_basis(params, eps, RegionClass.EVANESCENT)
        t_quad = time_of_flight(pair, consts, params, barrier, energy, 0.0, barrier.width)
        if abs(t_quad - t_exact) > cross_check_tol * abs(t_exact):
            raise RqtrajError(
                f"delay cross-check failed: closed form {t_exact!r} vs quadrature {t_quad!r}"
            )
    return report


def nonrelativistic_delay(
    params: PhysicalParams,
    barrier: RectangularBarrier,
    energy_nr: float,
    consts: MicrostateConstants,
) -> NonRelDelayComparison:
    """Relativistic delays at eps = eps_nr + mc^2 next to the leading
    non-relativistic approximants (meaningful for |eps_nr| << mc^2).

    The sign convention is applied to eps_nr here: tunneling requires
    eps_nr < 0, hence a > 0.  The saturated pi/2 term carries sign(a) so
    the thick value remains the true q -> infinity limit of the exact
    formula under this convention.
    """
    if not params.relativistic:
        raise ValueError("the comparison evaluates the relativistic formulas; use relativistic params")
    eps_nr = energy_nr - barrier.height
    e0 = params.rest_energy
    if eps_nr == 0.0:
        raise TurningPointError(
            "eps_nr = 0 is the eps = mc^2 turning case; the non-relativistic form has a pole there"
        )
    eps = eps_nr + e0
    if region_of_epsilon(params, eps) is not RegionClass.EVANESCENT:
        raise NotEvanescentError(
            f"eps = eps_nr + mc^2 = {eps!r} is not in the forbidden band (|eps| < mc^2)"
        )
    a, b = consts.a, consts.b
    if (eps_nr < 0.0 and a <= 0.0) or (eps_nr > 0.0 and a >= 0.0):
        raise SignConventionError(
            f"need a > 0 for -mc^2 < eps_nr < 0 (and a < 0 for eps_nr > 0); got a={a!r}, eps_nr={eps_nr!r}"
        )
    thick_sign = math.copysign(1.0, a)
    q = barrier.width
    t_exact, t_thin, t_thick, xi = _delay_triplet(params, eps, a, b, q, thick_sign)
    rel = TunnelingReport(q, eps, a, b, t_exact, t_thin, t_thick, _regime(xi), xi)

    kappa_nr = math.sqrt(-2.0 * params.mass * eps_nr) / params.hbar
    pref_nr = params.hbar / (2.0 * eps_nr)
    t_exact_nr = pref_nr * (_arctan_face(a, b, 2.0 * kappa_nr * q) - math.atan(a + b))
    t_thin_nr = -2.0 * a * params.mass * q / (
        (1.0 + (a + b) ** 2) * math.sqrt(-2.0 * params.mass * eps_nr)
    )
    t_thick_nr = pref_nr * (thick_sign * 0.5 * math.pi - math.atan(a + b))
    return NonRelDelayComparison(rel, eps_nr, t_exact_nr, t_thin_nr, t_thick_nr)
