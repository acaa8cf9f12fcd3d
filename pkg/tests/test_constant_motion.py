import math

import numpy as np
import pytest

from rqtraj import (
    MicrostateConstants,
    PhysicalParams,
    classical_reference,
    conjugate_momentum,
    constant_basis,
    divergence_time,
    evanescent_position,
    evanescent_velocity,
    max_speed,
    node_table,
    propagating_position,
    propagating_velocity,
    velocity_law,
)
from rqtraj.errors import LogSingularityError, VelocityPoleError, ZeroEpsilonError

SQRT2 = math.sqrt(2.0)
EPS = SQRT2  # local energy used throughout the oscillatory tests


def test_classical_line(natural, classical_consts):
    # a = 1, b = 0 is exactly the classical uniform motion.
    x, n = propagating_position(natural, EPS, classical_consts, SQRT2)
    assert x == pytest.approx(1.0, abs=1e-12)
    ts = np.linspace(-8.0, 8.0, 81)
    xs, _ = propagating_position(natural, EPS, classical_consts, ts)
    np.testing.assert_allclose(xs, ts / SQRT2, atol=1e-12)


def test_position_at_reference_time(natural, rng):
    # t = t0 gives arctan(-b/a)/k regardless of branch machinery.
    for _ in range(10):
        a = float(rng.choice((-1, 1)) * rng.uniform(0.3, 4.0))
        b = float(rng.uniform(-2.0, 2.0))
        x, n = propagating_position(natural, EPS, MicrostateConstants(a, b), 0.0)
        assert n == 0
        assert x == pytest.approx(math.atan(-b / a), abs=1e-14)


def test_first_node_continuity(natural):
    # Window changes at the node time; x must pass continuously through
    # the node value pi/2 (limit of the closed form as tan -> inf).
    consts = MicrostateConstants(2.0, 0.0)
    t_node = math.pi * SQRT2 / 2.0
    x_node, _ = propagating_position(natural, EPS, consts, t_node)
    assert x_node == pytest.approx(math.pi / 2.0, abs=1e-9)
    before, n_b = propagating_position(natural, EPS, consts, t_node - 1e-7)
    after, n_a = propagating_position(natural, EPS, consts, t_node + 1e-7)
    assert n_a - n_b == 1
    assert after - before == pytest.approx(0.0, abs=1e-4)
    assert before < x_node < after


def test_monotonicity_both_directions(natural):
    ts = np.linspace(0.0, 17.0, 400)
    for a, increasing in ((1.7, True), (-1.7, False)):
        xs, _ = propagating_position(natural, EPS, MicrostateConstants(a, 0.4), ts)
        diffs = np.diff(xs)
        assert np.all(diffs > 0) if increasing else np.all(diffs < 0)


def test_velocity_values(natural):
    assert propagating_velocity(natural, EPS, MicrostateConstants(1.0, 0.0), 1.23) == pytest.approx(1 / SQRT2, rel=1e-12)
    half = MicrostateConstants(0.5, 0.0)
    assert propagating_velocity(natural, EPS, half, 0.0) == pytest.approx(SQRT2, rel=1e-12)
    # halfway between nodes the speed drops to a*c*sqrt/eps
    t_mid = math.pi * SQRT2 / 2.0
    assert propagating_velocity(natural, EPS, half, t_mid) == pytest.approx(0.5 / SQRT2, rel=1e-12)


def test_velocity_one_sign_and_periodic(natural):
    consts = MicrostateConstants(-0.8, 1.1)
    ts = np.linspace(0.0, 20.0, 500)
    v = propagating_velocity(natural, EPS, consts, ts)
    assert np.all(v < 0.0)
    dt_n = math.pi * SQRT2
    np.testing.assert_allclose(
        propagating_velocity(natural, EPS, consts, ts + dt_n), v, rtol=1e-9
    )


def test_velocity_is_position_derivative(natural, rng):
    h = 1e-6
    for _ in range(8):
        consts = MicrostateConstants(float(rng.uniform(0.4, 3.0)), float(rng.uniform(-2, 2)))
        t = float(rng.uniform(0.1, 9.0))
        xp, _ = propagating_position(natural, EPS, consts, t + h)
        xm, _ = propagating_position(natural, EPS, consts, t - h)
        v = propagating_velocity(natural, EPS, consts, t)
        assert v == pytest.approx((xp - xm) / (2 * h), rel=1e-7)


def test_node_table_geometry(natural, classical_consts):
    # Frozen oracle values for eps = sqrt(2): dt = pi*sqrt(2), dx = pi.
    table = node_table(natural, EPS, classical_consts, (0, 4))
    assert table.dt == pytest.approx(math.pi * SQRT2, rel=1e-12)
    assert table.dx == pytest.approx(math.pi, rel=1e-12)
    np.testing.assert_allclose(np.diff(table.t), table.dt, rtol=1e-12)
    np.testing.assert_allclose(np.diff(table.x), table.dx, rtol=1e-12)
    assert table.t[0] == pytest.approx(math.pi * SQRT2 / 2.0, rel=1e-12)
    assert table.x[0] == pytest.approx(math.pi / 2.0, rel=1e-12)


def test_node_table_accepts_iterable_and_t0_shift(natural):
    shifted = MicrostateConstants(1.0, 0.0, t0=2.0)
    table = node_table(natural, EPS, shifted, [0, 1, 2])
    base = node_table(natural, EPS, MicrostateConstants(1.0, 0.0), [0, 1, 2])
    np.testing.assert_allclose(table.t, base.t + 2.0, rtol=1e-12)
    np.testing.assert_allclose(table.x, base.x, rtol=0)


def test_mean_velocity_and_de_broglie(natural, classical_consts, rng):
    for _ in range(20):
        eps = float(rng.uniform(1.01, 5.0))
        table = node_table(natural, eps, classical_consts, (0, 3))
        v_cl, p_cl = classical_reference(natural, eps, 0.0)
        assert abs(table.mean_velocity - v_cl) <= 1e-12
        assert abs(table.dx - 0.5 * table.lambda_db) <= 1e-12
        assert abs(table.lambda_db - 2.0 * math.pi / p_cl) <= 1e-12
        assert abs(table.mean_velocity) <= natural.light_speed


def test_node_independence_of_microstate(natural):
    table = node_table(natural, EPS, MicrostateConstants(1.0, 0.0), (0, 4))
    for a in (0.3, 0.5, 1.0, 2.0, 5.0):
        for b in (-2.0, 0.0, 2.0):
            xs, _ = propagating_position(natural, EPS, MicrostateConstants(a, b), table.t)
            assert np.max(np.abs(xs - table.x)) <= 1e-9


def test_superluminal_peak_vs_subluminal_mean(natural):
    consts = MicrostateConstants(0.5, 0.0)
    peak = max_speed(natural, EPS, consts)
    assert peak == pytest.approx(SQRT2, rel=1e-10)  # above c = 1
    ts = np.linspace(0.0, math.pi * SQRT2, 4000)
    assert np.max(np.abs(propagating_velocity(natural, EPS, consts, ts))) <= peak * (1 + 1e-12)
    table = node_table(natural, EPS, consts, (0, 5))
    assert abs(table.mean_velocity) <= natural.light_speed


def test_classical_limit_hbar_scaling():
    # Node spacings shrink linearly with hbar and every trajectory
    # collapses onto the classical line at the same rate.
    consts = MicrostateConstants(2.0, -1.0)
    ts = np.linspace(0.05, 3.0, 400)
    devs, dxs = [], []
    for hbar in (1e-1, 1e-2, 1e-3):
        p = PhysicalParams(1.0, 1.0, hbar)
        table = node_table(p, EPS, consts, (0, 1))
        dxs.append(table.dx)
        xs, _ = propagating_position(p, EPS, consts, ts)
        devs.append(np.max(np.abs(xs - ts / SQRT2)))
    dxs, devs = np.array(dxs), np.array(devs)
    np.testing.assert_allclose(dxs[:-1] / dxs[1:], 10.0, rtol=1e-12)
    slopes = np.diff(np.log(devs)) / np.diff(np.log((1e-1, 1e-2, 1e-3)))
    assert np.all(np.abs(slopes - 1.0) < 0.05)


def test_propagating_requires_oscillatory_regime(natural, classical_consts):
    with pytest.raises(ValueError):
        propagating_position(natural, 0.6, classical_consts, 0.0)
    nr = PhysicalParams(mode="non_relativistic")
    with pytest.raises(ValueError):
        node_table(nr, EPS, classical_consts, (0, 1))


# --- forbidden regime ---------------------------------------------------------

ENTRY = MicrostateConstants(-1.0, 0.0)


def test_divergence_time_value(natural):
    # t1 = pi*hbar*eps / (2 (m^2c^4 - eps^2)) for 0 < eps < mc^2.
    assert divergence_time(natural, 0.6, ENTRY) == pytest.approx(math.pi * 0.6 / (2 * 0.64), rel=1e-12)
    neg = divergence_time(natural, -0.6, MicrostateConstants(1.0, 0.0))
    assert neg == pytest.approx(math.pi * 0.6 / (2 * 0.64), rel=1e-12)


def test_entry_asymptote(natural):
    # x -> -inf as t -> t0+ (the particle enters from far left).
    xs = evanescent_position(natural, 0.6, ENTRY, np.array([1e-10, 1e-6, 1e-3]))
    assert xs[0] < xs[1] < xs[2]
    assert xs[0] < -10.0


def test_position_finite_at_divergence_time(natural):
    t1 = divergence_time(natural, 0.6, ENTRY)
    x = evanescent_position(natural, 0.6, ENTRY, t1)
    assert np.isfinite(x) and abs(x) < 30.0


def test_log_singularity_raised(natural):
    # a = -1, b = -1: the log argument vanishes where tan(beta t) = 1.
    consts = MicrostateConstants(-1.0, -1.0)
    beta = 0.64 / 0.6
    t_sing = math.atan(1.0) / beta
    with pytest.raises(LogSingularityError):
        evanescent_position(natural, 0.6, consts, t_sing)


def test_velocity_pole_at_divergence_time(natural):
    t1 = divergence_time(natural, 0.6, ENTRY)
    with pytest.raises(VelocityPoleError):
        evanescent_velocity(natural, 0.6, ENTRY, t1)


def test_velocity_positive_on_entry_branch(natural):
    ts = np.linspace(0.05, 1.4, 50)
    v = evanescent_velocity(natural, 0.6, ENTRY, ts)
    assert np.all(v > 0.0)


def test_velocity_consistent_with_momentum_law(natural):
    # Dual-route check: the closed-form velocity equals the velocity law
    # applied to the exponential-pair momentum at the same position.
    ts = np.linspace(0.1, 1.35, 60)
    xs = evanescent_position(natural, 0.6, ENTRY, ts)
    v_closed = evanescent_velocity(natural, 0.6, ENTRY, ts)
    pair = constant_basis(natural, 0.6)
    p = conjugate_momentum(pair, ENTRY, xs)
    v_law = velocity_law(natural, 0.6, 0.0, p)
    np.testing.assert_allclose(v_closed, v_law, rtol=1e-10)


def test_velocity_consistency_with_offset_b(natural, rng):
    # Same dual-route check on the branch window where the tracked branch
    # applies, for nonzero b.
    for b in (-0.7, 0.5, 1.3):
        consts = MicrostateConstants(-1.0, b)
        beta = 0.64 / 0.6
        t_lo = math.atan(-b) / beta + 0.05
        t_hi = math.pi / (2 * beta) - 0.05
        ts = np.linspace(t_lo, t_hi, 30)
        xs = evanescent_position(natural, 0.6, consts, ts)
        v_closed = evanescent_velocity(natural, 0.6, consts, ts)
        pair = constant_basis(natural, 0.6)
        v_law = velocity_law(natural, 0.6, 0.0, conjugate_momentum(pair, consts, xs))
        np.testing.assert_allclose(v_closed, v_law, rtol=1e-10)


def test_forbidden_regime_guards(natural):
    with pytest.raises(ValueError):
        evanescent_position(natural, SQRT2, ENTRY, 0.3)
    with pytest.raises(ZeroEpsilonError):
        evanescent_position(natural, 0.0, ENTRY, 0.3)
