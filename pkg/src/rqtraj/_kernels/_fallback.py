"""NumPy implementation of the hot kernels.

Mirrors ``_core.pyx`` function-for-function; the package selects one of the
two at import time (see ``__init__``).  All array arguments are float64 and
C-contiguous, all scalar arguments are Python floats.  The residual kernels
expect their inputs already rescaled to natural units (mc^2 = 1 for
energies, c = 1 for velocities, hbar/mc for lengths), which keeps every term
O(1) and the cancellation budget at machine precision.
"""

import numpy as np

BACKEND_NAME = "python"


def trig_pair(k, x):
    """sin/cos solution pair with wavenumber k: (phi1, phi1', phi2, phi2')."""
    kx = k * x
    s = np.sin(kx)
    c = np.cos(kx)
    return s, k * c, c, -k * s


def exp_pair(kappa, x):
    """Growing/decaying exponential pair with rate kappa."""
    ep = np.exp(kappa * x)
    em = np.exp(-kappa * x)
    return ep, kappa * ep, em, -kappa * em


def momentum_triplet(phi1, dphi1, phi2, dphi2, gamma, a, b, hbar_w):
    """Conjugate momentum P = a*hbar*W / (phi2^2 + (a phi1 + b phi2)^2)
    and its first two x-derivatives.

    ``gamma`` is the local phi''/phi coefficient of the wave equation, used
    to eliminate second derivatives of the basis functions.
    """
    u = a * phi1 + b * phi2
    du = a * dphi1 + b * dphi2
    den = phi2 * phi2 + u * u
    d1 = 2.0 * (phi2 * dphi2 + u * du)
    d2 = 2.0 * (dphi2 * dphi2 + du * du) + 2.0 * gamma * den
    p = a * hbar_w / den
    r = d1 / den
    dp = -p * r
    d2p = p * (2.0 * r * r - d2 / den)
    return p, dp, d2p


def kinematics_triplet(p, dp, d2p, g, dg, d2g):
    """Velocity, acceleration and jerk from P(x) and the velocity numerator
    g(x) (xdot = g/P), using xddot = xdot * d(xdot)/dx etc."""
    f = g / p
    f1 = (dg - f * dp) / p
    f2 = (d2g - 2.0 * f1 * dp - f * d2p) / p
    xd = f
    xdd = f * f1
    xddd = f * (f1 * f1 + f * f2)
    return xd, xdd, xddd


def qshje_residual_rel(p, dp, d2p, eps):
    """Relativistic stationary HJ residual in natural units (already
    dimensionless; an exact reduced action gives 0)."""
    r = dp / p
    return 0.5 * p * p + 0.5 - 0.5 * eps * eps - 0.25 * (1.5 * r * r - d2p / p)


def qshje_residual_nonrel(p, dp, d2p, eps_nr):
    """Non-relativistic stationary HJ residual in natural units."""
    r = dp / p
    return 0.5 * p * p - eps_nr - 0.25 * (1.5 * r * r - d2p / p)


def firqnl_residual_rel(xd, xdd, xddd, eps, dv, d2v):
    """Conservation-law residual of the relativistic third-order equation of
    motion, natural units; zero along true trajectories."""
    e2 = eps * eps
    a = 1.0 - e2
    rat = xdd / xd
    t1 = a * a * a * (1.0 - e2 * (1.0 - xd * xd))
    t2 = 0.5 * a * a * e2 * (1.5 * rat * rat - xddd / xd)
    t3 = 0.5 * (1.0 - e2 * e2) * eps * (xd * xd * d2v + xdd * dv)
    t4 = 0.25 * (1.0 - 10.0 * e2 - 3.0 * e2 * e2) * (xd * dv) ** 2
    return t1 + t2 + t3 + t4


def fiqnl_residual_nonrel(xd, xdd, xddd, u, dv, d2v, e4):
    """Non-relativistic counterpart, normalized by the fourth power of the
    total energy (e4)."""
    rat = xdd / xd
    t1 = u ** 4 - 0.5 * xd * xd * u ** 3
    t2 = 0.125 * (1.5 * rat * rat - xddd / xd) * u * u
    t3 = -0.125 * (xd * xd * d2v + xdd * dv) * u
    t4 = -0.1875 * (xd * dv) ** 2
    return (t1 + t2 + t3 + t4) / e4


def prop_position(t, t0, a, b, inv_k, omega):
    """Closed-form x(t) in a constant potential, oscillatory regime, with
    the branch constant that keeps x(t) continuous.

    Returns (x, n) where n is the branch-window index.  The phase is reduced
    modulo pi before taking the tangent so accuracy does not degrade with
    large t.
    """
    frac = omega * (t - t0) / np.pi
    n = np.rint(frac)
    psi = np.pi * (frac - n)
    sign_a = 1.0 if a > 0 else -1.0  # branch steps follow the motion's direction
    x = inv_k * (np.arctan((np.tan(psi) - b) / a) + np.pi * n * sign_a)
    return x, n.astype(np.int64)


def prop_velocity(t, t0, a, b, pref, omega):
    """Closed-form velocity in the oscillatory regime (pref = a*c*sqrt/eps)."""
    frac = omega * (t - t0) / np.pi
    psi = np.pi * (frac - np.rint(frac))
    c = np.cos(psi)
    s = np.sin(psi)
    sb = s - b * c
    return pref / (a * a * c * c + sb * sb)


def evan_position(t, t0, a, b, half_inv_kappa, beta):
    """Closed-form x(t) in a constant potential, classically forbidden
    regime.  Returns -inf/+inf/nan where the log argument vanishes; the
    caller converts those to errors."""
    frac = beta * (t - t0) / np.pi
    psi = np.pi * (frac - np.rint(frac))
    u = np.tan(psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return half_inv_kappa * np.log(np.abs((u + b) / a))


def evan_velocity(t, t0, a, b, pref, beta):
    """Closed-form velocity in the forbidden regime
    (pref = c*sqrt(m^2c^4-eps^2)/(2 eps)); diverges at the divergence
    times, returned as inf."""
    frac = beta * (t - t0) / np.pi
    psi = np.pi * (frac - np.rint(frac))
    u = np.tan(psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return pref * (1.0 + u * u) / (b + u)
