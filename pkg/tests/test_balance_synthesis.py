import math

import numpy as np
import pytest

from memopt import (
    BalanceCase,
    BalanceParams,
    Direction,
    DomainError,
    InfeasibleError,
    RegimeError,
    TransitionSpec,
    VoltageBounds,
    balance_pulse,
    balance_voltage_for_time,
)
from memopt import balance_synthesis as bs
from memopt.models import balance_memductance
from memopt.numerics import integrate_1d

T_LOWER = 72.55952662981831   # floor-level pulse width for the demo task
T_MIN = 26.693158108241953    # ceiling-level pulse width


@pytest.fixture
def lam_demo():
    return 2.7515e-6


def synth(p, spec, b, t, **kw):
    with pytest.warns(bs.OneSidedValidityWarning):
        return bs.synthesize(p, spec, b, t, **kw)


def test_density_zero_cases(balance_p):
    assert bs.lagrangian_density(balance_p, 0.0, 0.3, 0.0) == 0.0
    with pytest.raises(DomainError):
        bs.lagrangian_density(balance_p, 0.0, 1.0, 0.3)


def test_density_reference_value(balance_p, lam_demo):
    # tau(0.5) (G(0.1) 0.25 + lam) / 0.9, evaluated by hand
    tau = 148.0 * math.exp(-2.5)
    expected = tau * (1.009e-4 * 0.25 + lam_demo) / 0.9
    got = bs.lagrangian_density(balance_p, lam_demo, 0.1, 0.5)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(3.777e-4, rel=1e-3)


def test_density_monotone_when_no_pair(balance_p):
    # lam at least G/eta^2 kills the stationary pair; the density then
    # decreases with the drive level
    x = 0.2
    lam = balance_memductance(balance_p, x) / balance_p.eta_set**2
    vals = [bs.lagrangian_density(balance_p, lam * 1.01, x, v)
            for v in np.linspace(0.05, 3.0, 40)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_stationary_pair_structure(balance_p, lam_demo):
    x = 0.1
    g = balance_memductance(balance_p, x)
    eta = balance_p.eta_set
    # quadratic oracle: roots of eta g v^2 - 2 g v + lam eta
    roots = sorted(np.roots([eta * g, -2.0 * g, lam_demo * eta]).real)
    pair = bs.stationary_voltages(balance_p, lam_demo, x)
    assert pair.v_minus == pytest.approx(roots[0], rel=1e-10)
    assert pair.v_plus == pytest.approx(roots[1], rel=1e-10)
    assert pair.v_minus <= 1.0 / eta <= pair.v_plus
    # frozen oracle values for the demo point
    assert pair.v_minus == pytest.approx(0.08717080978523631, rel=1e-12)
    assert pair.v_plus == pytest.approx(0.31282919021476374, rel=1e-12)


def test_stationary_pair_degenerate_and_absent(balance_p):
    x = 0.3
    g = balance_memductance(balance_p, x)
    eta = balance_p.eta_set
    pair = bs.stationary_voltages(balance_p, g / eta**2, x)
    assert pair.v_minus == pair.v_plus == pytest.approx(1.0 / eta, rel=1e-12)
    assert bs.stationary_voltages(balance_p, g / eta**2 * 1.001, x) is None


def test_stationary_pair_zero_multiplier(balance_p):
    pair = bs.stationary_voltages(balance_p, 0.0, 0.4)
    assert pair.v_minus == pytest.approx(0.0, abs=1e-15)
    assert pair.v_plus == pytest.approx(2.0 / balance_p.eta_set, rel=1e-12)


def test_crossover(balance_p, lam_demo):
    # ties the local minimum: g(x, v_cross) = g(x, v_minus), beyond v_plus
    x = 0.1
    pair = bs.stationary_voltages(balance_p, lam_demo, x)
    v_cross = bs.crossover_voltage(balance_p, lam_demo, x)
    assert v_cross > pair.v_plus
    assert bs.lagrangian_density(balance_p, lam_demo, x, v_cross) == pytest.approx(
        bs.lagrangian_density(balance_p, lam_demo, x, pair.v_minus), rel=1e-9)
    assert v_cross == pytest.approx(0.5065605787622652, rel=1e-9)


def test_crossover_degenerate_and_divergent(balance_p):
    x = 0.3
    g = balance_memductance(balance_p, x)
    eta = balance_p.eta_set
    assert bs.crossover_voltage(balance_p, g / eta**2, x) == pytest.approx(
        1.0 / eta, rel=1e-12)
    assert bs.crossover_voltage(balance_p, 0.0, x) == math.inf
    with pytest.raises(DomainError):
        bs.crossover_voltage(balance_p, 1.0, x)


def test_optimal_voltage_branches(balance_p, bounds35, lam_demo):
    # no pair: ceiling wins
    assert bs.optimal_voltage_at_state(balance_p, bounds35, 1.0, 0.5) == 0.5
    # demo multiplier: ceiling early, floor late
    assert bs.optimal_voltage_at_state(balance_p, bounds35, lam_demo, 0.1) == 0.5
    assert bs.optimal_voltage_at_state(balance_p, bounds35, lam_demo, 0.9) == 0.3
    # degenerate band
    single = VoltageBounds(0.4, 0.4000000001)
    got = bs.optimal_voltage_at_state(balance_p, single, lam_demo, 0.5)
    assert got == pytest.approx(0.4, rel=1e-9)


def test_optimal_voltage_scale_invariance(balance_p, bounds35, lam_demo):
    # scaling the density by a positive constant (via tau0) keeps the choice
    scaled = BalanceParams(tau0_set=balance_p.tau0_set * 37.0,
                           tau0_reset=balance_p.tau0_reset,
                           eta_set=balance_p.eta_set, eta_reset=balance_p.eta_reset,
                           g_min=balance_p.g_min, g_max=balance_p.g_max)
    for x in np.linspace(0.1, 0.9, 17):
        assert bs.optimal_voltage_at_state(balance_p, bounds35, lam_demo, float(x)) \
            == bs.optimal_voltage_at_state(scaled, bounds35, lam_demo, float(x))


def test_classify_edge_bias(balance_p, set19, bounds35):
    d = bs.classify_regime(balance_p, set19, bounds35, 30.0)
    # 0.09 e^-1.5 - 0.25 e^-2.5, negative for this band
    expected = 0.09 * math.exp(-1.5) - 0.25 * math.exp(-2.5)
    assert d.edge_bias == pytest.approx(expected, rel=1e-12)
    assert d.edge_bias < 0
    assert d.case is BalanceCase.LEVEL_SCHEDULE

    wide = VoltageBounds(0.45, 0.5)
    d2 = bs.classify_regime(balance_p, set19, wide, 30.0)
    assert d2.edge_bias > 0
    assert d2.case is BalanceCase.MAX_PULSE_REST


def test_classify_boundaries(balance_p, set19, bounds35):
    assert not bs.classify_regime(balance_p, set19, bounds35, 20.0).feasible
    assert bs.classify_regime(balance_p, set19, bounds35, T_MIN).case \
        is BalanceCase.EXACT_MAX_PULSE
    assert bs.classify_regime(balance_p, set19, bounds35, 80.0).case \
        is BalanceCase.LOWER_PULSE_REST


def test_switching_time_limits(balance_p, set19, bounds35):
    assert bs.switching_time(balance_p, set19, bounds35, 0.0) == pytest.approx(
        T_LOWER, rel=1e-9)
    cap = balance_memductance(balance_p, 0.9) / balance_p.eta_set**2
    assert bs.switching_time(balance_p, set19, bounds35, cap) == pytest.approx(
        T_MIN, rel=1e-9)


def test_solve_multiplier_demo(balance_p, set19, bounds35):
    lam = bs.solve_multiplier(balance_p, set19, bounds35, 30.0)
    assert lam == pytest.approx(2.7515e-6, rel=1e-2)
    assert bs.switching_time(balance_p, set19, bounds35, lam) == pytest.approx(
        30.0, rel=1e-9)


def test_solve_multiplier_edges(balance_p, set19, bounds35):
    assert bs.solve_multiplier(balance_p, set19, bounds35, T_LOWER) == 0.0
    with pytest.raises(RegimeError):
        bs.solve_multiplier(balance_p, set19, bounds35, T_MIN)
    with pytest.raises(RegimeError):
        bs.solve_multiplier(balance_p, set19, bounds35, 80.0)
    with pytest.raises(RegimeError):
        bs.solve_multiplier(balance_p, set19, VoltageBounds(0.45, 0.5), 30.0)


def test_multiplier_saturates_toward_edges(balance_p, set19, bounds35):
    lam_fast = bs.solve_multiplier(balance_p, set19, bounds35, T_MIN * 1.000001)
    lam_mid = bs.solve_multiplier(balance_p, set19, bounds35, 30.0)
    lam_slow = bs.solve_multiplier(balance_p, set19, bounds35, T_LOWER * 0.999999)
    assert lam_fast > lam_mid > lam_slow > 0.0
    prof_fast, _ = synth(balance_p, set19, bounds35, T_MIN * 1.000001)
    assert np.mean(prof_fast.voltages == 0.5) > 0.99
    prof_slow, _ = synth(balance_p, set19, bounds35, T_LOWER * 0.999999)
    assert np.mean(prof_slow.voltages == 0.3) > 0.99


def test_synthesize_two_level_schedule(balance_p, set19, bounds35):
    prof, rep = synth(balance_p, set19, bounds35, 30.0)
    assert rep.case == BalanceCase.LEVEL_SCHEDULE.value
    assert abs(prof.budget_slack) <= 1e-6 * 30.0
    assert len(prof.events) == 1
    ev = prof.events[0]
    assert ev.kind == "level_switch"
    assert ev.time_s == pytest.approx(24.7, rel=1e-2)
    assert ev.v_before == 0.5 and ev.v_after == 0.3
    # switch state from the analytic tie of the two levels
    eta = balance_p.eta_set
    d = math.exp(-eta * 0.3) - math.exp(-eta * 0.5)
    g_sw = rep.lam1 * d / (-prof_bias(balance_p))
    x_sw = (g_sw - balance_p.g_min) / (balance_p.g_max - balance_p.g_min)
    assert ev.state == pytest.approx(x_sw, rel=1e-9)
    assert ev.state == pytest.approx(0.8828, rel=1e-3)


def prof_bias(p):
    return 0.09 * math.exp(-p.eta_set * 0.3) - 0.25 * math.exp(-p.eta_set * 0.5)


def test_synthesize_energy_matches_piece_oracle(balance_p, set19, bounds35):
    prof, rep = synth(balance_p, set19, bounds35, 30.0)
    x_sw = prof.events[0].state

    def seg_energy(xa, xb, v):
        return integrate_1d(
            lambda x: balance_memductance(balance_p, x) * v * v
            * 148.0 * math.exp(-balance_p.eta_set * v) / (1.0 - x), xa, xb)

    oracle = seg_energy(0.1, x_sw, 0.5) + seg_energy(x_sw, 0.9, 0.3)
    assert rep.energy == pytest.approx(oracle, rel=1e-9)


def test_energy_improvement_over_single_pulse(balance_p, set19, bounds35):
    _, rep = synth(balance_p, set19, bounds35, 30.0)
    v0 = balance_voltage_for_time(balance_p, set19, 30.0)
    single = balance_pulse(balance_p, set19, v0).energy
    assert single / rep.energy == pytest.approx(1.023, rel=5e-3)


def test_synthesize_rest_cases(balance_p, set19, bounds35):
    prof, rep = synth(balance_p, set19, bounds35, 80.0)
    assert rep.case == BalanceCase.LOWER_PULSE_REST.value
    assert rep.tc == pytest.approx(T_LOWER, rel=1e-12)
    assert np.allclose(prof.voltages, 0.3)

    prof2, rep2 = synth(balance_p, set19, bounds35, T_MIN)
    assert rep2.case == BalanceCase.EXACT_MAX_PULSE.value
    assert np.allclose(prof2.voltages, 0.5)

    with pytest.raises(InfeasibleError) as err:
        bs.synthesize(balance_p, set19, bounds35, 10.0)
    assert err.value.min_duration == pytest.approx(T_MIN, rel=1e-12)


def test_voltages_stay_in_band(balance_p, set19, bounds35):
    for t in (27.0, 30.0, 45.0, 65.0):
        prof, _ = synth(balance_p, set19, bounds35, t)
        mags = np.abs(prof.voltages)
        assert np.all(mags >= bounds35.v1_mag - 1e-12)
        assert np.all(mags <= bounds35.v2_mag + 1e-12)


def test_validity_warning_thresholds(set19, bounds35):
    fast = BalanceParams(tau0_set=1e4, tau0_reset=1e4, eta_set=5.0, eta_reset=-5.0,
                         g_min=1e-6, g_max=1e-3)
    t_min = balance_pulse(fast, set19, 0.5).duration
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bs.synthesize(fast, set19, bounds35, t_min * 1.5)  # far below 0.3 tau0


def test_reset_direction_mirror(balance_p):
    spec = TransitionSpec(Direction.RESET, 0.9, 0.1)
    bounds = VoltageBounds(0.3, 0.5)
    with pytest.warns(bs.OneSidedValidityWarning):
        prof, rep = bs.synthesize(balance_p, spec, bounds, 30.0)
    assert rep.case == BalanceCase.LEVEL_SCHEDULE.value
    assert np.all(prof.voltages <= -0.3 + 1e-15)
    assert np.all(prof.voltages >= -0.5 - 1e-15)
    assert abs(prof.budget_slack) <= 1e-6 * 30.0
    # lowering from high conductance: gentle first, hard finish
    assert prof.voltages[0] == pytest.approx(-0.3, abs=1e-12)
    assert prof.voltages[-1] == pytest.approx(-0.5, abs=1e-12)
