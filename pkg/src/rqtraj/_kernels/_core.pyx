# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels (see _fallback.py for the
reference NumPy version and the shared contracts)."""

import numpy as np

from libc.math cimport atan, cos, exp, fabs, log, rint, sin, tan

BACKEND_NAME = "compiled"

cdef double PI = 3.141592653589793238462643383279502884


def trig_pair(double k, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    p1 = np.empty(n)
    d1 = np.empty(n)
    p2 = np.empty(n)
    d2 = np.empty(n)
    cdef double[::1] vp1 = p1, vd1 = d1, vp2 = p2, vd2 = d2
    cdef double kx, s, c
    for i in range(n):
        kx = k * x[i]
        s = sin(kx)
        c = cos(kx)
        vp1[i] = s
        vd1[i] = k * c
        vp2[i] = c
        vd2[i] = -k * s
    return p1, d1, p2, d2


def exp_pair(double kappa, const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    p1 = np.empty(n)
    d1 = np.empty(n)
    p2 = np.empty(n)
    d2 = np.empty(n)
    cdef double[::1] vp1 = p1, vd1 = d1, vp2 = p2, vd2 = d2
    cdef double ep, em
    for i in range(n):
        ep = exp(kappa * x[i])
        em = exp(-kappa * x[i])
        vp1[i] = ep
        vd1[i] = kappa * ep
        vp2[i] = em
        vd2[i] = -kappa * em
    return p1, d1, p2, d2


def momentum_triplet(const double[::1] phi1, const double[::1] dphi1, const double[::1] phi2,
                     const double[::1] dphi2, const double[::1] gamma, double a, double b,
                     double hbar_w):
    cdef Py_ssize_t i, n = phi1.shape[0]
    p = np.empty(n)
    dp = np.empty(n)
    d2p = np.empty(n)
    cdef double[::1] vp = p, vdp = dp, vd2p = d2p
    cdef double u, du, den, d1, d2, pi_, r
    for i in range(n):
        u = a * phi1[i] + b * phi2[i]
        du = a * dphi1[i] + b * dphi2[i]
        den = phi2[i] * phi2[i] + u * u
        d1 = 2.0 * (phi2[i] * dphi2[i] + u * du)
        d2 = 2.0 * (dphi2[i] * dphi2[i] + du * du) + 2.0 * gamma[i] * den
        pi_ = a * hbar_w / den
        r = d1 / den
        vp[i] = pi_
        vdp[i] = -pi_ * r
        vd2p[i] = pi_ * (2.0 * r * r - d2 / den)
    return p, dp, d2p


def kinematics_triplet(const double[::1] p, const double[::1] dp, const double[::1] d2p,
                       const double[::1] g, const double[::1] dg, const double[::1] d2g):
    cdef Py_ssize_t i, n = p.shape[0]
    xd = np.empty(n)
    xdd = np.empty(n)
    xddd = np.empty(n)
    cdef double[::1] vxd = xd, vxdd = xdd, vxddd = xddd
    cdef double f, f1, f2
    for i in range(n):
        f = g[i] / p[i]
        f1 = (dg[i] - f * dp[i]) / p[i]
        f2 = (d2g[i] - 2.0 * f1 * dp[i] - f * d2p[i]) / p[i]
        vxd[i] = f
        vxdd[i] = f * f1
        vxddd[i] = f * (f1 * f1 + f * f2)
    return xd, xdd, xddd


def qshje_residual_rel(const double[::1] p, const double[::1] dp, const double[::1] d2p,
                       const double[::1] eps):
    cdef Py_ssize_t i, n = p.shape[0]
    res = np.empty(n)
    cdef double[::1] vres = res
    cdef double r
    for i in range(n):
        r = dp[i] / p[i]
        vres[i] = (0.5 * p[i] * p[i] + 0.5 - 0.5 * eps[i] * eps[i]
                   - 0.25 * (1.5 * r * r - d2p[i] / p[i]))
    return res


def qshje_residual_nonrel(const double[::1] p, const double[::1] dp, const double[::1] d2p,
                          const double[::1] eps_nr):
    cdef Py_ssize_t i, n = p.shape[0]
    res = np.empty(n)
    cdef double[::1] vres = res
    cdef double r
    for i in range(n):
        r = dp[i] / p[i]
        vres[i] = (0.5 * p[i] * p[i] - eps_nr[i]
                   - 0.25 * (1.5 * r * r - d2p[i] / p[i]))
    return res


def firqnl_residual_rel(const double[::1] xd, const double[::1] xdd, const double[::1] xddd,
                        const double[::1] eps, const double[::1] dv, const double[::1] d2v):
    cdef Py_ssize_t i, n = xd.shape[0]
    res = np.empty(n)
    cdef double[::1] vres = res
    cdef double e2, a, rat, t1, t2, t3, t4, w
    for i in range(n):
        e2 = eps[i] * eps[i]
        a = 1.0 - e2
        rat = xdd[i] / xd[i]
        t1 = a * a * a * (1.0 - e2 * (1.0 - xd[i] * xd[i]))
        t2 = 0.5 * a * a * e2 * (1.5 * rat * rat - xddd[i] / xd[i])
        t3 = 0.5 * (1.0 - e2 * e2) * eps[i] * (xd[i] * xd[i] * d2v[i]
                                               + xdd[i] * dv[i])
        w = xd[i] * dv[i]
        t4 = 0.25 * (1.0 - 10.0 * e2 - 3.0 * e2 * e2) * w * w
        vres[i] = t1 + t2 + t3 + t4
    return res


def fiqnl_residual_nonrel(const double[::1] xd, const double[::1] xdd, const double[::1] xddd,
                          const double[::1] u, const double[::1] dv, const double[::1] d2v,
                          double e4):
    cdef Py_ssize_t i, n = xd.shape[0]
    res = np.empty(n)
    cdef double[::1] vres = res
    cdef double rat, t1, t2, t3, t4, w, ui
    for i in range(n):
        ui = u[i]
        rat = xdd[i] / xd[i]
        t1 = ui * ui * ui * ui - 0.5 * xd[i] * xd[i] * ui * ui * ui
        t2 = 0.125 * (1.5 * rat * rat - xddd[i] / xd[i]) * ui * ui
        t3 = -0.125 * (xd[i] * xd[i] * d2v[i] + xdd[i] * dv[i]) * ui
        w = xd[i] * dv[i]
        t4 = -0.1875 * w * w
        vres[i] = (t1 + t2 + t3 + t4) / e4
    return res


def prop_position(const double[::1] t, double t0, double a, double b, double inv_k,
                  double omega):
    cdef Py_ssize_t i, m = t.shape[0]
    x = np.empty(m)
    n = np.empty(m, dtype=np.int64)
    cdef double[::1] vx = x
    cdef long long[::1] vn = n
    cdef double frac, nn, psi
    cdef double sign_a = 1.0 if a > 0 else -1.0
    for i in range(m):
        frac = omega * (t[i] - t0) / PI
        nn = rint(frac)
        psi = PI * (frac - nn)
        vx[i] = inv_k * (atan((tan(psi) - b) / a) + PI * nn * sign_a)
        vn[i] = <long long> nn
    return x, n


def prop_velocity(const double[::1] t, double t0, double a, double b, double pref,
                  double omega):
    cdef Py_ssize_t i, m = t.shape[0]
    v = np.empty(m)
    cdef double[::1] vv = v
    cdef double frac, psi, c, s, sb
    for i in range(m):
        frac = omega * (t[i] - t0) / PI
        psi = PI * (frac - rint(frac))
        c = cos(psi)
        s = sin(psi)
        sb = s - b * c
        vv[i] = pref / (a * a * c * c + sb * sb)
    return v


def evan_position(const double[::1] t, double t0, double a, double b,
                  double half_inv_kappa, double beta):
    cdef Py_ssize_t i, m = t.shape[0]
    x = np.empty(m)
    cdef double[::1] vx = x
    cdef double frac, psi, u
    for i in range(m):
        frac = beta * (t[i] - t0) / PI
        psi = PI * (frac - rint(frac))
        u = tan(psi)
        vx[i] = half_inv_kappa * log(fabs((u + b) / a))
    return x


def evan_velocity(const double[::1] t, double t0, double a, double b, double pref,
                  double beta):
    cdef Py_ssize_t i, m = t.shape[0]
    v = np.empty(m)
    cdef double[::1] vv = v
    cdef double frac, psi, u
    for i in range(m):
        frac = beta * (t[i] - t0) / PI
        psi = PI * (frac - rint(frac))
        u = tan(psi)
        vv[i] = pref * (1.0 + u * u) / (b + u)
    return v
