"""memopt: energy-optimal programming protocols for first-order memristive devices.

Closed-form switching time and energy for constant pulses, constrained
minimum-energy protocol synthesis under programming-time and drive-band
limits, staircase waveform export, and validation by direct integration
of the device state equation.
"""

from __future__ import annotations

from . import balance_synthesis, vteam_synthesis
from .closed_form import (
    Direction,
    InfeasibleError,
    PulseResult,
    SaturatedBoundError,
    TransitionSpec,
    balance_pulse,
    balance_state_at,
    balance_voltage_for_time,
    vteam_min_switch_time,
    vteam_pulse,
    vteam_unconstrained_optimum,
    vteam_voltage_for_time,
)
from .models import (
    BalanceParams,
    DomainError,
    VteamParams,
    admissible_interval,
    balance_memductance,
    balance_state_rate,
    vteam_memductance,
    vteam_state_rate,
)
from .numerics import (
    BracketError,
    ConvergenceError,
    QuadConfig,
    RootConfig,
    StiffnessError,
    find_root,
    integrate_1d,
    integrate_ode,
)
from .profiles import (
    BalanceCase,
    ProfileEvent,
    RegimeCase,
    StateProfile,
    SynthesisReport,
    VoltageBounds,
)
from .simulate import SimulationTrace, SolverConfig, compare, simulate
from .vteam_synthesis import RegimeError
from .waveform import (
    EnergyBreakdown,
    Protocol,
    Segment,
    merge_segments,
    profile_to_protocol,
    protocol_energy,
    protocol_final_state,
)

__version__ = "0.1.0"


def synthesize(params, spec, bounds, t_total, **kwargs):
    """Model-generic synthesis entry; dispatches on the parameter record."""
    if isinstance(params, VteamParams):
        return vteam_synthesis.synthesize(params, spec, bounds, t_total, **kwargs)
    if isinstance(params, BalanceParams):
        return balance_synthesis.synthesize(params, spec, bounds, t_total, **kwargs)
    raise TypeError(f"unsupported parameter record {type(params).__name__}")


def pulse(params, spec, v0):
    """Model-generic constant-pulse characterization."""
    if isinstance(params, VteamParams):
        return vteam_pulse(params, spec, v0)
    if isinstance(params, BalanceParams):
        return balance_pulse(params, spec, v0)
    raise TypeError(f"unsupported parameter record {type(params).__name__}")


def voltage_for_time(params, spec, t_total):
    """Model-generic inverse of the constant-pulse duration map."""
    if isinstance(params, VteamParams):
        return vteam_voltage_for_time(params, spec, t_total)
    if isinstance(params, BalanceParams):
        return balance_voltage_for_time(params, spec, t_total)
    raise TypeError(f"unsupported parameter record {type(params).__name__}")


def min_switch_time(params, spec, v2):
    """Model-generic shortest switching time at the signed ceiling v2."""
    return pulse(params, spec, v2).duration
