"""Closed-form switching time and energy for constant-amplitude pulses.

For both device models and both transition directions this module gives
the pulse duration and dissipated energy as explicit functions of the
amplitude, the amplitude minimizing dissipation when a finite minimizer
exists, the shortest admissible switching time at a given ceiling, and
the inverse map from a time budget to the constant amplitude meeting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .models import BalanceParams, DomainError, VteamParams, tau_reset, tau_set


class Direction(str, Enum):
    """Transition sense. RESET raises the threshold-model state (positive
    drive, conductance falls); SET is the mirrored negative-drive motion.
    For the balance model SET raises the state under positive drive and
    RESET lowers it under negative drive."""

    RESET = "reset"
    SET = "set"


class InfeasibleError(Exception):
    """No admissible stimulus realizes the request.

    When the blocker is a programming window shorter than the fastest
    admissible switching, min_duration carries that floor in seconds.
    """

    def __init__(self, msg: str, min_duration: float | None = None):
        super().__init__(msg)
        self.min_duration = min_duration


class SaturatedBoundError(ValueError):
    """A transition endpoint sits on a bound the state only reaches asymptotically."""


@dataclass(frozen=True)
class TransitionSpec:
    """A requested state transition, endpoints strictly inside the range
    wherever the approached bound is asymptotic."""

    direction: Direction
    x_i: float
    x_f: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "direction", Direction(self.direction))
        if not (math.isfinite(self.x_i) and math.isfinite(self.x_f)):
            raise ValueError("transition endpoints must be finite")
        if self.x_i == self.x_f:
            raise ValueError("transition endpoints must differ")


@dataclass(frozen=True)
class PulseResult:
    energy: float     # J
    duration: float   # s
    amplitude: float  # V, signed


def _vteam_drive(p: VteamParams, direction: Direction) -> tuple[float, float, float, float]:
    """(rate magnitude, exponent, threshold magnitude, voltage sign) for a direction."""
    if direction is Direction.RESET:
        return p.k_off, p.alpha_off, p.v_off, 1.0
    return -p.k_on, p.alpha_on, -p.v_on, -1.0


def check_vteam_transition(p: VteamParams, spec: TransitionSpec) -> None:
    lo, hi = sorted((spec.x_i, spec.x_f))
    if lo < p.w_on or hi > p.w_off:
        raise DomainError(f"transition [{spec.x_i}, {spec.x_f}] outside [{p.w_on}, {p.w_off}]")
    if spec.direction is Direction.RESET:
        if spec.x_i > spec.x_f:
            raise ValueError("a reset transition must raise the state")
        if spec.x_f >= p.w_off:
            raise SaturatedBoundError("the upper state bound is only reached asymptotically")
    else:
        if spec.x_i < spec.x_f:
            raise ValueError("a set transition must lower the state")
        if spec.x_f <= p.w_on:
            raise SaturatedBoundError("the lower state bound is only reached asymptotically")


def _vteam_piece(p: VteamParams, direction: Direction, wa: float, wb: float,
                 u: float) -> tuple[float, float]:
    """Duration and energy while the state sweeps the ordered slice [wa, wb]
    under a constant drive of magnitude u beyond the threshold."""
    kappa, alpha, v_thr, _ = _vteam_drive(p, direction)
    rho = kappa * (u / v_thr - 1.0) ** alpha
    dg = p.g_max - p.g_min
    if direction is Direction.RESET:
        log = math.log((p.w_off - wa) / (p.w_off - wb))
        duration = p.span * log / rho
        energy = u * u * (p.g_min * p.span * log + dg * (wb - wa)) / rho
    else:
        log = math.log((wb - p.w_on) / (wa - p.w_on))
        duration = p.span * log / rho
        energy = u * u * (p.g_max * p.span * log - dg * (wb - wa)) / rho
    return duration, energy


def vteam_pulse(p: VteamParams, spec: TransitionSpec, v0: float) -> PulseResult:
    """Constant pulse completing the transition: energy, width, amplitude.

    The amplitude must lie beyond the direction's threshold (a value in
    the dead zone, or of the wrong sign, cannot drive the motion).
    """
    check_vteam_transition(p, spec)
    _, _, v_thr, sgn = _vteam_drive(p, spec.direction)
    if sgn * v0 <= v_thr:
        raise InfeasibleError(
            f"amplitude {v0} V cannot drive a {spec.direction.value} transition "
            f"(threshold magnitude {v_thr} V)")
    wa, wb = sorted((spec.x_i, spec.x_f))
    duration, energy = _vteam_piece(p, spec.direction, wa, wb, abs(v0))
    return PulseResult(energy=energy, duration=duration, amplitude=v0)


def vteam_unconstrained_optimum(p: VteamParams, spec: TransitionSpec) -> PulseResult | None:
    """Finite amplitude minimizing pulse energy, or None when the exponent
    is 2 or larger and energy decreases monotonically with amplitude."""
    check_vteam_transition(p, spec)
    _, alpha, v_thr, sgn = _vteam_drive(p, spec.direction)
    if alpha >= 2.0:
        return None
    u_star = 2.0 * v_thr / (2.0 - alpha)
    wa, wb = sorted((spec.x_i, spec.x_f))
    duration, energy = _vteam_piece(p, spec.direction, wa, wb, u_star)
    return PulseResult(energy=energy, duration=duration, amplitude=sgn * u_star)


def vteam_min_switch_time(p: VteamParams, spec: TransitionSpec, v2: float) -> float:
    """Shortest achievable switching time, the pulse width at the signed ceiling v2."""
    return vteam_pulse(p, spec, v2).duration


def vteam_voltage_for_time(p: VteamParams, spec: TransitionSpec, t: float) -> float:
    """Signed constant amplitude whose pulse width equals t (inverse of the
    duration map; feasibility against a ceiling is the caller's check)."""
    check_vteam_transition(p, spec)
    kappa, alpha, v_thr, sgn = _vteam_drive(p, spec.direction)
    if not t > 0:
        raise ValueError("the time budget must be positive")
    if spec.direction is Direction.RESET:
        log = math.log((p.w_off - spec.x_i) / (p.w_off - spec.x_f))
    else:
        log = math.log((spec.x_i - p.w_on) / (spec.x_f - p.w_on))
    u = v_thr * (1.0 + (p.span * log / (kappa * t)) ** (1.0 / alpha))
    return sgn * u


def check_balance_transition(p: BalanceParams, spec: TransitionSpec) -> None:
    lo, hi = sorted((spec.x_i, spec.x_f))
    if lo < 0.0 or hi > 1.0:
        raise DomainError(f"transition [{spec.x_i}, {spec.x_f}] outside [0, 1]")
    if spec.direction is Direction.SET:
        if spec.x_i > spec.x_f:
            raise ValueError("a set transition must raise the state")
        if spec.x_f >= 1.0:
            raise SaturatedBoundError("the saturated state x = 1 is only reached asymptotically")
    else:
        if spec.x_i < spec.x_f:
            raise ValueError("a reset transition must lower the state")
        if spec.x_f <= 0.0:
            raise SaturatedBoundError("the depleted state x = 0 is only reached asymptotically")


def _balance_level(p: BalanceParams, direction: Direction, xa: float, xb: float,
                   u: float) -> tuple[float, float]:
    """Duration and energy for the ordered slice [xa, xb] under a constant
    drive magnitude u, in the one-sided approximation of the direction."""
    dg = p.g_max - p.g_min
    if direction is Direction.SET:
        tau = tau_set(p, u)
        log = math.log((1.0 - xa) / (1.0 - xb))
        duration = tau * log
        energy = u * u * tau * (p.g_max * log - dg * (xb - xa))
    else:
        tau = tau_reset(p, -u)
        log = math.log(xb / xa)
        duration = tau * log
        energy = u * u * tau * (p.g_min * log + dg * (xb - xa))
    return duration, energy


def balance_pulse(p: BalanceParams, spec: TransitionSpec, v0: float) -> PulseResult:
    """Constant pulse completing the transition under the one-sided rate."""
    check_balance_transition(p, spec)
    sgn = 1.0 if spec.direction is Direction.SET else -1.0
    if sgn * v0 <= 0.0:
        raise InfeasibleError(
            f"amplitude {v0} V has the wrong polarity for a {spec.direction.value} transition")
    xa, xb = sorted((spec.x_i, spec.x_f))
    duration, energy = _balance_level(p, spec.direction, xa, xb, abs(v0))
    return PulseResult(energy=energy, duration=duration, amplitude=v0)


def balance_state_at(p: BalanceParams, spec: TransitionSpec, v0: float, t: float) -> float:
    """State after holding v0 for time t from x_i, one-sided dynamics."""
    check_balance_transition(p, spec)
    sgn = 1.0 if spec.direction is Direction.SET else -1.0
    if sgn * v0 <= 0.0:
        raise InfeasibleError(
            f"amplitude {v0} V has the wrong polarity for a {spec.direction.value} transition")
    if spec.direction is Direction.SET:
        return 1.0 + (spec.x_i - 1.0) * math.exp(-t / tau_set(p, v0))
    return spec.x_i * math.exp(-t / tau_reset(p, v0))


def balance_voltage_for_time(p: BalanceParams, spec: TransitionSpec, t: float) -> float:
    """Signed constant amplitude whose one-sided pulse width equals t."""
    check_balance_transition(p, spec)
    if not t > 0:
        raise ValueError("the time budget must be positive")
    if spec.direction is Direction.SET:
        tau0, eta, sgn = p.tau0_set, p.eta_set, 1.0
        log = math.log((1.0 - spec.x_i) / (1.0 - spec.x_f))
    else:
        tau0, eta, sgn = p.tau0_reset, -p.eta_reset, -1.0
        log = math.log(spec.x_i / spec.x_f)
    if t >= tau0 * log:
        raise InfeasibleError(
            f"budget {t} s is not below the zero-bias switching time {tau0 * log} s")
    return sgn * math.log(tau0 * log / t) / eta
