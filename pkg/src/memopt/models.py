"""Device models: a threshold-driven memristor and a relaxation-balance memristor.

Both models are first-order: a scalar internal state x drives a linear
state-dependent conductance (memductance), and a voltage-controlled rate
function governs the state evolution. All quantities are SI (volts,
seconds, siemens, joules); display scaling is left to callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """State or voltage lies outside the admissible domain of a model function."""


@dataclass(frozen=True)
class VteamParams:
    """Threshold-model parameter record.

    The state w lives in [w_on, w_off]. Above the positive threshold v_off
    the state rate is k_off * (V/v_off - 1)**alpha_off scaled by a linear
    window vanishing at w_off; below the negative threshold v_on it is the
    mirrored expression with k_on (negative) and a window vanishing at
    w_on. Between the thresholds the state is frozen. Conductance
    interpolates linearly from g_max at w_on down to g_min at w_off.
    """

    k_off: float   # 1/s, > 0
    k_on: float    # 1/s, < 0
    alpha_off: float
    alpha_on: float
    v_off: float   # V, > 0
    v_on: float    # V, < 0
    w_on: float
    w_off: float
    g_min: float   # S
    g_max: float   # S

    def __post_init__(self) -> None:
        if not self.k_off > 0:
            raise ValueError(f"k_off must be positive, got {self.k_off}")
        if not self.k_on < 0:
            raise ValueError(f"k_on must be negative, got {self.k_on}")
        if not self.alpha_off > 0:
            raise ValueError(f"alpha_off must be positive, got {self.alpha_off}")
        if not self.alpha_on > 0:
            raise ValueError(f"alpha_on must be positive, got {self.alpha_on}")
        if not self.v_off > 0:
            raise ValueError(f"v_off must be positive, got {self.v_off}")
        if not self.v_on < 0:
            raise ValueError(f"v_on must be negative, got {self.v_on}")
        if not self.w_on < self.w_off:
            raise ValueError(f"state bounds must satisfy w_on < w_off, got [{self.w_on}, {self.w_off}]")
        if not 0 < self.g_min < self.g_max:
            raise ValueError(f"conductance bounds must satisfy 0 < g_min < g_max, got [{self.g_min}, {self.g_max}]")

    @property
    def span(self) -> float:
        return self.w_off - self.w_on


@dataclass(frozen=True)
class BalanceParams:
    """Relaxation-balance parameter record.

    The state x lives in [0, 1] and relaxes toward 1 with a raising time
    constant tau0_set * exp(-eta_set * V) and toward 0 with a lowering
    time constant tau0_reset * exp(-eta_reset * V). eta_set > 0 so
    positive voltage accelerates raising; eta_reset < 0 mirrors this for
    negative voltage. Conductance interpolates from g_min at x = 0 to
    g_max at x = 1.
    """

    tau0_set: float    # s, > 0
    tau0_reset: float  # s, > 0
    eta_set: float     # 1/V, > 0
    eta_reset: float   # 1/V, < 0
    g_min: float       # S
    g_max: float       # S

    def __post_init__(self) -> None:
        if not self.tau0_set > 0:
            raise ValueError(f"tau0_set must be positive, got {self.tau0_set}")
        if not self.tau0_reset > 0:
            raise ValueError(f"tau0_reset must be positive, got {self.tau0_reset}")
        if not self.eta_set > 0:
            raise ValueError(f"eta_set must be positive, got {self.eta_set}")
        if not self.eta_reset < 0:
            raise ValueError(f"eta_reset must be negative, got {self.eta_reset}")
        if not 0 < self.g_min < self.g_max:
            raise ValueError(f"conductance bounds must satisfy 0 < g_min < g_max, got [{self.g_min}, {self.g_max}]")


def admissible_interval(params: VteamParams | BalanceParams) -> tuple[float, float]:
    """Closed state interval the model confines its state variable to."""
    if isinstance(params, VteamParams):
        return params.w_on, params.w_off
    if isinstance(params, BalanceParams):
        return 0.0, 1.0
    raise TypeError(f"unsupported parameter record {type(params).__name__}")


def _check_w(p: VteamParams, w: float) -> None:
    if not p.w_on <= w <= p.w_off:
        raise DomainError(f"state {w} outside [{p.w_on}, {p.w_off}]")


def _check_x(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"state {x} outside [0, 1]")


def vteam_memductance(p: VteamParams, w: float) -> float:
    """Conductance at state w: g_max at w_on, g_min at w_off, linear between."""
    _check_w(p, w)
    return p.g_max + (p.g_min - p.g_max) * (w - p.w_on) / p.span


def vteam_state_rate(p: VteamParams, w: float, v: float) -> float:
    """State rate dw/dt under voltage v; zero inside the dead zone [v_on, v_off]."""
    _check_w(p, w)
    if v > p.v_off:
        base = v / p.v_off - 1.0
        assert base >= 0.0
        return p.k_off * base**p.alpha_off * (p.w_off - w) / p.span
    if v < p.v_on:
        base = v / p.v_on - 1.0
        assert base >= 0.0
        return p.k_on * base**p.alpha_on * (w - p.w_on) / p.span
    return 0.0


def balance_memductance(p: BalanceParams, x: float) -> float:
    """Conductance at state x: (1 - x) g_min + x g_max."""
    _check_x(x)
    return (1.0 - x) * p.g_min + x * p.g_max


def tau_set(p: BalanceParams, v: float) -> float:
    """Raising time constant, tau0_set * exp(-eta_set * v); positive for finite v."""
    return p.tau0_set * math.exp(-p.eta_set * v)


def tau_reset(p: BalanceParams, v: float) -> float:
    """Lowering time constant, tau0_reset * exp(-eta_reset * v)."""
    return p.tau0_reset * math.exp(-p.eta_reset * v)


def balance_state_rate(p: BalanceParams, x: float, v: float, mode: str = "full") -> float:
    """State rate dx/dt.

    mode selects the full two-term balance or a one-sided approximation
    keeping only the raising ("set_only") or lowering ("reset_only")
    relaxation. The full rate is exactly the sum of the two one-sided
    rates.
    """
    _check_x(x)
    set_term = (1.0 - x) / tau_set(p, v)
    reset_term = -x / tau_reset(p, v)
    if mode == "full":
        return set_term + reset_term
    if mode == "set_only":
        return set_term
    if mode == "reset_only":
        return reset_term
    raise ValueError(f"unknown rate mode {mode!r}")
