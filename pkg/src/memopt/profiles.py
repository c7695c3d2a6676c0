"""Shared synthesis artifacts: drive bounds, state-parameterized profiles, reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .closed_form import Direction


@dataclass(frozen=True)
class VoltageBounds:
    """Admissible drive-magnitude band; signs are applied per direction."""

    v1_mag: float
    v2_mag: float

    def __post_init__(self) -> None:
        if not 0 < self.v1_mag < self.v2_mag:
            raise ValueError(
                f"bounds must satisfy 0 < v1_mag < v2_mag, got [{self.v1_mag}, {self.v2_mag}]")


class RegimeCase(str, Enum):
    """Threshold-model protocol regimes.

    EXACT_MAX_PULSE: the budget equals the feasibility floor; the ceiling
    amplitude fills the whole window. MAX_PULSE_REST: the ceiling is
    (weakly) energy-optimal, applied for the floor duration, zero drive
    after. OPTIMAL_PULSE_REST: a finite interior optimum exists below the
    ceiling and its pulse fits the budget, rest after. STATE_FEEDBACK:
    the budget binds between those pulses; the drive follows the
    multiplier-governed state-dependent level.
    """

    EXACT_MAX_PULSE = "exact_max_pulse"
    MAX_PULSE_REST = "max_pulse_rest"
    OPTIMAL_PULSE_REST = "optimal_pulse_rest"
    STATE_FEEDBACK = "state_feedback"


class BalanceCase(str, Enum):
    """Balance-model protocol regimes, mirroring RegimeCase.

    LOWER_PULSE_REST: the band floor is energy-optimal and its pulse fits
    the budget. LEVEL_SCHEDULE: the budget binds; the drive steps between
    band edges (and possibly an interior stationary level) as the state
    advances.
    """

    EXACT_MAX_PULSE = "exact_max_pulse"
    MAX_PULSE_REST = "max_pulse_rest"
    LOWER_PULSE_REST = "lower_pulse_rest"
    LEVEL_SCHEDULE = "level_schedule"


@dataclass(frozen=True)
class ProfileEvent:
    """A distinguished point along the profile: where the drive clamps to a
    band edge or jumps between levels."""

    kind: str      # "max_clamp", "min_clamp", "level_switch"
    state: float
    time_s: float  # measured from the start of the active phase
    v_before: float
    v_after: float


@dataclass
class StateProfile:
    """Drive level as a function of state, plus the derived schedule facts.

    states runs monotonically from x_i to x_f in traversal order;
    voltages are signed. voltage_of_state is the continuous profile the
    sampled arrays were drawn from; quadratures downstream use it, the
    grid is for export.
    """

    direction: Direction
    states: np.ndarray
    voltages: np.ndarray
    case: str
    lam1: float        # S V^2, 0 when the budget constraint is slack
    tc: float          # active switching time, <= t_total
    t_total: float     # programming window
    voltage_of_state: Callable[[float], float]
    events: list[ProfileEvent] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.states = np.asarray(self.states, dtype=float)
        self.voltages = np.asarray(self.voltages, dtype=float)
        if self.states.shape != self.voltages.shape:
            raise ValueError("states and voltages must have matching shapes")
        steps = np.diff(self.states)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("the state grid must be strictly monotone")

    @property
    def budget_slack(self) -> float:
        """tc - t_total; nonpositive for every valid schedule, zero when
        the window is fully used."""
        return self.tc - self.t_total


@dataclass(frozen=True)
class SynthesisReport:
    case: str
    lam1: float
    tc: float
    energy: float   # predicted dissipation of the active phase, J
    feasible: bool
    min_t: float    # feasibility floor for the task
