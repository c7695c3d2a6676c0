import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from memopt.numerics import (
    BracketError,
    ConvergenceError,
    QuadConfig,
    RootConfig,
    StiffnessError,
    find_root,
    grow_bracket,
    integrate_1d,
    integrate_ode,
)


def test_root_linear():
    assert find_root(lambda v: v - 3.0, 0.0, 10.0) == pytest.approx(3.0, abs=1e-9)


def test_root_sqrt2():
    r = find_root(lambda v: v * v - 2.0, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), rel=1e-10)


def test_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root(lambda v: v, 1.0, 2.0)


def test_root_endpoint_hits():
    assert find_root(lambda v: v, 0.0, 1.0) == 0.0
    assert find_root(lambda v: v - 1.0, 0.0, 1.0) == 1.0


def test_root_budget():
    with pytest.raises(ConvergenceError):
        find_root(lambda v: v - 0.37, 0.0, 1.0, RootConfig(rel_tol=1e-10, max_iter=3))


@given(root=st.floats(-50.0, 50.0), scale=st.floats(0.1, 10.0))
def test_root_stays_in_bracket(root, scale):
    lo, hi = root - scale, root + 2.0 * scale
    r = find_root(lambda v: (v - root) ** 3 + 1e-3 * (v - root), lo, hi)
    assert lo <= r <= hi
    assert r == pytest.approx(root, abs=1e-6 * max(1.0, abs(root)))


def test_grow_bracket():
    lo, hi = grow_bracket(lambda v: v - 7.0, 0.0, 1.0)
    assert lo == 0.0 and hi >= 7.0
    assert find_root(lambda v: v - 7.0, lo, hi) == pytest.approx(7.0, rel=1e-9)
    with pytest.raises(BracketError):
        grow_bracket(lambda v: v + 1.0, 0.0, 1.0, max_grow=10)


def test_quad_constant():
    assert integrate_1d(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_quad_log_integrand():
    got = integrate_1d(lambda x: 1.0 / (1.0 - x), 0.1, 0.9)
    assert got == pytest.approx(math.log(9.0), rel=1e-10)


def test_quad_empty_and_reversed():
    assert integrate_1d(lambda x: x, 0.3, 0.3) == 0.0
    fwd = integrate_1d(lambda x: x * x, 0.0, 2.0)
    assert integrate_1d(lambda x: x * x, 2.0, 0.0) == pytest.approx(-fwd, rel=1e-12)


@pytest.mark.parametrize("f,F,a,b", [
    (lambda x: math.exp(x), lambda x: math.exp(x), -1.0, 2.0),
    (lambda x: math.sin(x), lambda x: -math.cos(x), 0.0, 3.0),
    (lambda x: 1.0 / x, lambda x: math.log(x), 0.5, 4.0),
    (lambda x: x ** 5, lambda x: x ** 6 / 6.0, -1.0, 1.5),
    (lambda x: 1.0 / (1.0 + x * x), lambda x: math.atan(x), -2.0, 2.0),
])
def test_quad_smoke_suite(f, F, a, b):
    cfg = QuadConfig(rel_tol=1e-10)
    got = integrate_1d(f, a, b, cfg)
    exact = F(b) - F(a)
    assert abs(got - exact) <= 10.0 * cfg.rel_tol * abs(got) + 1e-15


def test_ode_zero_rate():
    t, x = integrate_ode(lambda t, x: 0.0, 0.7, 0.0, 2.0, dt=0.1)
    assert np.all(x == 0.7)
    assert t[0] == 0.0 and t[-1] == 2.0


def test_ode_exponential_decay():
    t, x = integrate_ode(lambda t, x: -x, 1.0, 0.0, 1.0, dt=1e-4)
    assert abs(x[-1] - math.exp(-1.0)) < 1e-8


def test_ode_clamp_saturates():
    t, x = integrate_ode(lambda t, x: 10.0, 0.95, 0.0, 1.0, dt=1e-3, clamp=(0.0, 1.0))
    assert x[-1] == 1.0
    assert np.max(x) <= 1.0


def test_ode_fourth_order_convergence():
    errs = []
    for dt in (1e-2, 5e-3):
        _, x = integrate_ode(lambda t, x: -x, 1.0, 0.0, 1.0, dt=dt)
        errs.append(abs(x[-1] - math.exp(-1.0)))
    ratio = errs[0] / errs[1]
    assert 12.0 < ratio < 20.0


def test_ode_adaptive_matches_fixed():
    _, x = integrate_ode(lambda t, x: -x, 1.0, 0.0, 1.0, tol=1e-10)
    assert abs(x[-1] - math.exp(-1.0)) < 1e-8


def test_ode_adaptive_stiffness_error():
    # rate blows up approaching t = 1, forcing the step below the floor
    def nasty(t, x):
        return 1.0 / max(1.0 - t, 1e-300) ** 2

    with pytest.raises(StiffnessError):
        integrate_ode(nasty, 0.0, 0.0, 1.0, tol=1e-10)


def test_ode_argument_validation():
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: 0.0, 0.0, 1.0, 0.0, dt=0.1)
    with pytest.raises(ValueError):
        integrate_ode(lambda t, x: 0.0, 2.0, 0.0, 1.0, dt=0.1, clamp=(0.0, 1.0))
