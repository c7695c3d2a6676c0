import pytest

from memopt import (
    BalanceParams,
    Direction,
    TransitionSpec,
    VoltageBounds,
    VteamParams,
)


def make_vteam(alpha: float) -> VteamParams:
    return VteamParams(k_off=1e5, k_on=-1e5, alpha_off=alpha, alpha_on=alpha,
                       v_off=1.0, v_on=-1.0, w_on=0.0, w_off=1.0,
                       g_min=1e-5, g_max=1e-3)


@pytest.fixture
def vteam_a1() -> VteamParams:
    return make_vteam(1.0)


@pytest.fixture
def vteam_a2() -> VteamParams:
    return make_vteam(2.0)


@pytest.fixture
def vteam_a3() -> VteamParams:
    return make_vteam(3.0)


@pytest.fixture
def reset19() -> TransitionSpec:
    return TransitionSpec(Direction.RESET, 0.1, 0.9)


@pytest.fixture
def set91() -> TransitionSpec:
    return TransitionSpec(Direction.SET, 0.9, 0.1)


@pytest.fixture
def bounds15() -> VoltageBounds:
    return VoltageBounds(1.0, 5.0)


@pytest.fixture
def balance_p() -> BalanceParams:
    return BalanceParams(tau0_set=148.0, tau0_reset=148.0, eta_set=5.0,
                         eta_reset=-5.0, g_min=1e-6, g_max=1e-3)


@pytest.fixture
def set19() -> TransitionSpec:
    return TransitionSpec(Direction.SET, 0.1, 0.9)


@pytest.fixture
def bounds35() -> VoltageBounds:
    return VoltageBounds(0.3, 0.5)
