import math

import pytest
from hypothesis import given, strategies as st

from memopt import (
    BalanceParams,
    DomainError,
    VteamParams,
    balance_memductance,
    balance_state_rate,
    vteam_memductance,
    vteam_state_rate,
)
from memopt.models import tau_reset, tau_set

from conftest import make_vteam


@pytest.mark.parametrize("field,value", [
    ("k_off", -1.0), ("k_off", 0.0),
    ("k_on", 1.0),
    ("alpha_off", 0.0), ("alpha_on", -2.0),
    ("v_off", -1.0), ("v_on", 0.5),
    ("g_min", 0.0),
])
def test_vteam_params_rejects_bad_signs(field, value):
    kwargs = dict(k_off=1e5, k_on=-1e5, alpha_off=1.0, alpha_on=1.0,
                  v_off=1.0, v_on=-1.0, w_on=0.0, w_off=1.0,
                  g_min=1e-5, g_max=1e-3)
    kwargs[field] = value
    with pytest.raises(ValueError):
        VteamParams(**kwargs)


def test_vteam_params_rejects_bad_ordering():
    with pytest.raises(ValueError):
        make_vteam(1.0).__class__(k_off=1e5, k_on=-1e5, alpha_off=1, alpha_on=1,
                                  v_off=1, v_on=-1, w_on=1.0, w_off=0.0,
                                  g_min=1e-5, g_max=1e-3)
    with pytest.raises(ValueError):
        make_vteam(1.0).__class__(k_off=1e5, k_on=-1e5, alpha_off=1, alpha_on=1,
                                  v_off=1, v_on=-1, w_on=0.0, w_off=1.0,
                                  g_min=1e-3, g_max=1e-5)


@pytest.mark.parametrize("field,value", [
    ("tau0_set", 0.0), ("tau0_reset", -1.0),
    ("eta_set", -5.0), ("eta_reset", 5.0),
    ("g_min", -1e-6),
])
def test_balance_params_rejects_bad_signs(field, value):
    kwargs = dict(tau0_set=148.0, tau0_reset=148.0, eta_set=5.0, eta_reset=-5.0,
                  g_min=1e-6, g_max=1e-3)
    kwargs[field] = value
    with pytest.raises(ValueError):
        BalanceParams(**kwargs)


def test_vteam_memductance_endpoints(vteam_a1):
    assert vteam_memductance(vteam_a1, 0.0) == vteam_a1.g_max
    assert vteam_memductance(vteam_a1, 1.0) == vteam_a1.g_min


def test_vteam_memductance_interior_value(vteam_a1):
    # hand evaluation of the linear map at w = 0.1
    assert vteam_memductance(vteam_a1, 0.1) == pytest.approx(9.01e-4, rel=1e-12)


def test_vteam_memductance_domain(vteam_a1):
    with pytest.raises(DomainError):
        vteam_memductance(vteam_a1, 1.5)
    with pytest.raises(DomainError):
        vteam_memductance(vteam_a1, -0.1)


def test_vteam_rate_dead_zone(vteam_a1):
    assert vteam_state_rate(vteam_a1, 0.4, 0.5 * vteam_a1.v_off) == 0.0
    assert vteam_state_rate(vteam_a1, 0.4, 0.0) == 0.0
    assert vteam_state_rate(vteam_a1, 0.4, -0.5) == 0.0


def test_vteam_rate_reference_value(vteam_a1):
    # k_off (V/v_off - 1)^alpha with a full window at w = 0
    assert vteam_state_rate(vteam_a1, 0.0, 2.0) == pytest.approx(1e5, rel=1e-12)


def test_vteam_rate_window_zeros(vteam_a1):
    assert vteam_state_rate(vteam_a1, 1.0, 3.0) == 0.0
    assert vteam_state_rate(vteam_a1, 0.0, -3.0) == 0.0


@given(w=st.floats(0.0, 1.0), v=st.floats(-8.0, 8.0))
def test_vteam_rate_sign_matches_region(w, v):
    p = make_vteam(1.3)
    rate = vteam_state_rate(p, w, v)
    if v > p.v_off:
        assert rate >= 0.0
    elif v < p.v_on:
        assert rate <= 0.0
    else:
        assert rate == 0.0


def test_balance_memductance_endpoints(balance_p):
    assert balance_memductance(balance_p, 0.0) == balance_p.g_min
    assert balance_memductance(balance_p, 1.0) == balance_p.g_max
    assert balance_memductance(balance_p, 0.1) == pytest.approx(1.009e-4, rel=1e-12)
    with pytest.raises(DomainError):
        balance_memductance(balance_p, 1.2)


def test_balance_rate_reference_value(balance_p):
    # (1 - x) / tau with tau = 148 exp(-2.5)
    expected = 0.9 / (148.0 * math.exp(-2.5))
    got = balance_state_rate(balance_p, 0.1, 0.5, "set_only")
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(0.07408, rel=1e-3)


def test_balance_rate_balance_point(balance_p):
    # full rate vanishes where the two relaxations tie
    v = 0.2
    ts, tr = tau_set(balance_p, v), tau_reset(balance_p, v)
    x = tr / (ts + tr)
    assert balance_state_rate(balance_p, x, v, "full") == pytest.approx(0.0, abs=1e-18)


def test_balance_rate_saturated(balance_p):
    assert balance_state_rate(balance_p, 1.0, 0.7, "set_only") == 0.0
    assert balance_state_rate(balance_p, 0.0, -0.7, "reset_only") == 0.0


@given(x=st.floats(0.0, 1.0), v=st.floats(-2.0, 2.0))
def test_balance_full_is_exact_sum_of_modes(x, v):
    p = BalanceParams(tau0_set=148.0, tau0_reset=97.0, eta_set=5.0, eta_reset=-3.0,
                      g_min=1e-6, g_max=1e-3)
    full = balance_state_rate(p, x, v, "full")
    parts = (balance_state_rate(p, x, v, "set_only")
             + balance_state_rate(p, x, v, "reset_only"))
    assert full == parts


def test_tau_positive(balance_p):
    for v in (-3.0, 0.0, 3.0):
        assert tau_set(balance_p, v) > 0
        assert tau_reset(balance_p, v) > 0


def test_bad_rate_mode(balance_p):
    with pytest.raises(ValueError):
        balance_state_rate(balance_p, 0.5, 0.1, "both")
