"""Exception hierarchy shared by all rqtraj modules."""


class RqtrajError(Exception):
    """Base class for every error raised by this package."""


class OutOfDomainError(RqtrajError):
    """Requested position lies outside the declared domain."""


class AtDiscontinuityError(RqtrajError):
    """Position coincides with a potential-segment boundary; use one-sided
    evaluation (``side='left'`` or ``side='right'``)."""


class TurningPointError(RqtrajError):
    """(E - V)^2 equals (m c^2)^2 within tolerance: the trajectory law is
    degenerate here and the equations refuse to evaluate."""


class ZeroEpsilonError(RqtrajError):
    """E - V vanishes: pole of the relativistic velocity law."""


class WronskianDriftError(RqtrajError):
    """Numerically integrated solution pair failed the Wronskian-constancy
    bound."""


class NoSolutionError(RqtrajError):
    """Constants matching two solution bases failed global verification."""


class TurningInIntervalError(RqtrajError):
    """A turning point lies inside the requested flight interval, so the
    time integrand has a pole there."""


class QuadratureError(RqtrajError):
    """Adaptive quadrature did not reach the requested tolerance."""


class LogSingularityError(RqtrajError):
    """Argument of the logarithm in the evanescent position formula hit
    zero at the requested time."""


class VelocityPoleError(RqtrajError):
    """Evanescent velocity diverges at the requested time (divergence time
    of the constant-potential motion)."""


class SignConventionError(RqtrajError):
    """Signs of a and E - V0 violate the convention that keeps the barrier
    traversal delay positive (a < 0 for 0 < eps < mc^2, a > 0 for
    -mc^2 < eps < 0)."""


class NotEvanescentError(RqtrajError):
    """Region inside the barrier is not classically forbidden,
    (E - V0)^2 >= (m c^2)^2."""


class ClassicallyForbiddenError(RqtrajError):
    """Classical reference quantities requested where (E-V)^2 < (m c^2)^2."""


class IoError(RqtrajError):
    """Artifact file could not be written."""


class SchemaError(RqtrajError):
    """Scenario configuration failed validation.

    Carries the full list of violations as ``(path, message)`` pairs so a
    single run reports every problem at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.violations)
        super().__init__(f"invalid configuration ({lines})")
