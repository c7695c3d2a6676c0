"""Time-domain protocols: staircase discretization of state profiles,
segment merging, and analytic per-segment energy accounting.

A protocol is an ordered train of constant-voltage segments. Under a
constant voltage both models relax exponentially with an explicit state
solution, so the energy of each segment has a closed form; for the
balance model the accounting uses the one-sided rate matched to the
drive polarity, consistent with the synthesis that produced the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .closed_form import Direction
from .models import (
    BalanceParams,
    VteamParams,
    balance_memductance,
    balance_state_rate,
    tau_reset,
    tau_set,
    vteam_memductance,
    vteam_state_rate,
)
from .numerics import QuadConfig, integrate_1d
from .profiles import ProfileEvent, StateProfile


class SingularRateError(RuntimeError):
    """The state rate vanished inside a slice that must be traversed."""


@dataclass(frozen=True)
class Segment:
    duration: float  # s, > 0
    voltage: float   # V

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")


@dataclass
class Protocol:
    segments: list[Segment]
    case: str = ""
    events: list[ProfileEvent] = field(default_factory=list)

    @property
    def total_duration(self) -> float:
        return sum(seg.duration for seg in self.segments)


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    per_segment: list[float]


def _rate_magnitude(params, direction: Direction, x: float, v: float) -> float:
    if isinstance(params, VteamParams):
        rate = vteam_state_rate(params, x, v)
    else:
        mode = "set_only" if direction is Direction.SET else "reset_only"
        rate = balance_state_rate(params, x, v, mode)
    mag = abs(rate)
    if mag == 0.0:
        raise SingularRateError(f"state rate vanishes at x = {x}, v = {v}")
    return mag


def profile_to_protocol(params, profile: StateProfile, segments: int = 1000,
                        quad: QuadConfig = QuadConfig()) -> Protocol:
    """Discretize a state profile into a pulse train.

    The state interval is split into the requested number of equal slices
    plus exact cuts at recorded profile events; each slice lasts the time
    the state needs to cross it under the profile voltage and carries the
    voltage at the slice midpoint. Adjacent slices with identical
    voltages collapse, and a zero-voltage rest segment pads the window
    when the active time falls short of it.
    """
    if segments < 1:
        raise ValueError("at least one segment is required")
    x_i = float(profile.states[0])
    x_f = float(profile.states[-1])
    edges = [x_i + (x_f - x_i) * k / segments for k in range(segments + 1)]
    event_states = [ev.state for ev in profile.events if min(x_i, x_f) < ev.state < max(x_i, x_f)]
    ascending = x_f > x_i
    edges = sorted(set(edges) | set(event_states), reverse=not ascending)

    out: list[Segment] = []
    for xa, xb in zip(edges[:-1], edges[1:]):
        lo, hi = sorted((xa, xb))
        if hi - lo < 1e-15 * abs(x_f - x_i):
            continue
        v_mid = profile.voltage_of_state(0.5 * (xa + xb))
        # the slice carries its midpoint voltage, so its duration is the time
        # the state needs to cross it under exactly that voltage; the
        # exported train then reproduces the state path slice by slice
        duration = integrate_1d(
            lambda x: 1.0 / _rate_magnitude(params, profile.direction, x, v_mid),
            lo, hi, quad)
        if out and out[-1].voltage == v_mid:
            out[-1] = Segment(out[-1].duration + duration, v_mid)
        else:
            out.append(Segment(duration, v_mid))

    rest = profile.t_total - profile.tc
    if rest > 1e-9 * max(profile.t_total, 1e-300):
        out.append(Segment(rest, 0.0))
    return Protocol(segments=out, case=profile.case, events=list(profile.events))


def merge_segments(protocol: Protocol, tol_volts: float) -> Protocol:
    """Merge runs of adjacent segments whose voltage stays within tol_volts
    of the run's first segment; durations add, the run keeps its first
    voltage. Idempotent."""
    merged: list[Segment] = []
    for seg in protocol.segments:
        if merged and abs(seg.voltage - merged[-1].voltage) <= tol_volts:
            merged[-1] = Segment(merged[-1].duration + seg.duration, merged[-1].voltage)
        else:
            merged.append(seg)
    return Protocol(segments=merged, case=protocol.case, events=list(protocol.events))


def _vteam_segment(p: VteamParams, x0: float, seg: Segment) -> tuple[float, float]:
    """(final state, energy) for one constant-voltage segment, exact."""
    v, dt = seg.voltage, seg.duration
    dg = p.g_max - p.g_min
    if v > p.v_off:
        c = p.k_off * (v / p.v_off - 1.0) ** p.alpha_off / p.span
        x1 = p.w_off - (p.w_off - x0) * math.exp(-c * dt)
        energy = v * v * (p.g_min * dt + dg * (x1 - x0) / (c * p.span))
    elif v < p.v_on:
        c = -p.k_on * (v / p.v_on - 1.0) ** p.alpha_on / p.span
        x1 = p.w_on + (x0 - p.w_on) * math.exp(-c * dt)
        energy = v * v * (p.g_max * dt - dg * (x0 - x1) / (c * p.span))
    else:
        x1 = x0
        energy = vteam_memductance(p, x0) * v * v * dt
    return x1, energy


def _balance_segment(p: BalanceParams, x0: float, seg: Segment) -> tuple[float, float]:
    """(final state, energy) under the polarity-matched one-sided rate."""
    v, dt = seg.voltage, seg.duration
    dg = p.g_max - p.g_min
    if v > 0.0:
        tau = tau_set(p, v)
        x1 = 1.0 - (1.0 - x0) * math.exp(-dt / tau)
        energy = v * v * (p.g_max * dt - dg * tau * (x1 - x0))
    elif v < 0.0:
        tau = tau_reset(p, v)
        x1 = x0 * math.exp(-dt / tau)
        energy = v * v * (p.g_min * dt + dg * tau * (x0 - x1))
    else:
        x1 = x0
        energy = 0.0
    return x1, energy


def protocol_energy(params, protocol: Protocol, x0: float) -> EnergyBreakdown:
    """Dissipated energy of a protocol from initial state x0, using the
    exact exponential state solution of each segment."""
    step = _vteam_segment if isinstance(params, VteamParams) else _balance_segment
    x = float(x0)
    per_segment: list[float] = []
    for seg in protocol.segments:
        x, e = step(params, x, seg)
        per_segment.append(e)
    return EnergyBreakdown(total=math.fsum(per_segment), per_segment=per_segment)


def protocol_final_state(params, protocol: Protocol, x0: float) -> float:
    """Final state of the exact per-segment evolution (one-sided for the
    balance model)."""
    step = _vteam_segment if isinstance(params, VteamParams) else _balance_segment
    x = float(x0)
    for seg in protocol.segments:
        x, _ = step(params, x, seg)
    return x
