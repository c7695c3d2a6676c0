"""Constrained minimum-energy protocol synthesis for the relaxation-balance model.

Under the one-sided approximation the dissipation density per unit state
advance of a raising transition is tau(V) (G(x) V^2 + lam1) / (1 - x)
with tau(V) = tau0 exp(-eta V). Its stationary points in V solve

    eta G V^2 - 2 G V + eta lam1 = 0,

real only where G(x) / eta^2 >= lam1; the smaller root is a local
minimum, the larger a local maximum, and the density decays to zero past
it. The pointwise minimizer over the band [V1, V2] is therefore either a
band edge or the interior stationary level, and which one wins can flip
as the state advances, producing stepped schedules. Lowering transitions
map onto the same machinery by reflecting the state (y = 1 - x) and the
drive sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .closed_form import (
    Direction,
    InfeasibleError,
    TransitionSpec,
    _balance_level,
    check_balance_transition,
)
from .models import BalanceParams, DomainError
from .numerics import QuadConfig, RootConfig, find_root, grow_bracket, integrate_1d
from .profiles import BalanceCase, ProfileEvent, StateProfile, SynthesisReport, VoltageBounds
from .vteam_synthesis import RegimeError


class OneSidedValidityWarning(UserWarning):
    """The programming window is no longer small against the zero-bias
    relaxation scales, so the one-sided approximation degrades."""


@dataclass(frozen=True)
class StationaryPair:
    """Real stationary drive levels of the dissipation density at one state;
    v_minus is the local minimum, v_plus the local maximum."""

    v_minus: float
    v_plus: float


@dataclass(frozen=True)
class BalanceDecision:
    feasible: bool
    case: BalanceCase | None
    t_min: float            # pulse width at the ceiling
    t_lower: float | None   # pulse width at the floor, when the floor can win
    edge_bias: float        # v1^2 e^(-eta v1) - v2^2 e^(-eta v2)
    required_min: float


@dataclass(frozen=True)
class _Frame:
    """Raising-normalized view of a transition: state y grows toward 1,
    drive magnitude u is positive, G(y) = (1 - y) ga + y gb."""

    tau0: float
    eta: float
    ga: float
    gb: float
    y_i: float
    y_f: float
    sgn: float

    def tau(self, u: float) -> float:
        return self.tau0 * math.exp(-self.eta * u)

    def g_of(self, y: float) -> float:
        return (1.0 - y) * self.ga + y * self.gb

    def to_state(self, y: float) -> float:
        return y if self.sgn > 0 else 1.0 - y


def _frame(p: BalanceParams, spec: TransitionSpec) -> _Frame:
    check_balance_transition(p, spec)
    if spec.direction is Direction.SET:
        return _Frame(p.tau0_set, p.eta_set, p.g_min, p.g_max, spec.x_i, spec.x_f, 1.0)
    return _Frame(p.tau0_reset, -p.eta_reset, p.g_max, p.g_min,
                  1.0 - spec.x_i, 1.0 - spec.x_f, -1.0)


def _set_frame(p: BalanceParams) -> _Frame:
    # pointwise raising-direction view, no transition attached
    return _Frame(p.tau0_set, p.eta_set, p.g_min, p.g_max, 0.0, 0.0, 1.0)


def _g(frame: _Frame, lam1: float, y: float, u: float) -> float:
    return frame.tau(u) * (frame.g_of(y) * u * u + lam1) / (1.0 - y)


def _stationary(frame: _Frame, lam1: float, y: float) -> StationaryPair | None:
    disc = 1.0 / frame.eta**2 - lam1 / frame.g_of(y)
    if disc < 0.0:
        return None
    s = math.sqrt(disc)
    return StationaryPair(1.0 / frame.eta - s, 1.0 / frame.eta + s)


def _crossover(frame: _Frame, lam1: float, y: float, pair: StationaryPair,
               root: RootConfig = RootConfig()) -> float:
    """Level beyond the local maximum where the decaying tail of the
    density ties the local minimum; infinite when lam1 = 0 (the tail
    approaches zero without reaching it)."""
    if lam1 == 0.0:
        return math.inf
    if pair.v_plus == pair.v_minus:
        return pair.v_plus
    target = _g(frame, lam1, y, pair.v_minus)

    def f(u: float) -> float:
        return _g(frame, lam1, y, u) - target

    if f(pair.v_plus) <= 0.0:
        return pair.v_plus
    lo, hi = grow_bracket(f, pair.v_plus, pair.v_plus + 1.0 / frame.eta, root)
    return find_root(f, lo, hi, root)


def _level(frame: _Frame, v1: float, v2: float, lam1: float, y: float,
           root: RootConfig = RootConfig()) -> tuple[float, str]:
    """Band minimizer of the density at state y: (magnitude, branch id)."""
    pair = _stationary(frame, lam1, y)
    if pair is None:
        return v2, "max"
    if v1 < pair.v_minus:
        if v2 < pair.v_minus:
            return v2, "max"
        if v2 <= _crossover(frame, lam1, y, pair, root):
            return pair.v_minus, "stat"
        return v2, "max"
    if _g(frame, lam1, y, v1) < _g(frame, lam1, y, v2):
        return v1, "min"
    return v2, "max"


def lagrangian_density(p: BalanceParams, lam1: float, x: float, v: float) -> float:
    """Dissipation-plus-constraint density tau(v) (G(x) v^2 + lam1) / (1 - x)
    for a raising transition; singular at the saturated state."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"state {x} outside [0, 1)")
    return _g(_set_frame(p), lam1, x, v)


def stationary_voltages(p: BalanceParams, lam1: float, x: float) -> StationaryPair | None:
    """Real stationary pair of the raising density at state x, or None when
    G(x) / eta^2 < lam1 and the density decreases monotonically."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"state {x} outside [0, 1)")
    return _stationary(_set_frame(p), lam1, x)


def crossover_voltage(p: BalanceParams, lam1: float, x: float,
                      root: RootConfig = RootConfig()) -> float:
    """Tie level of the density tail against its local minimum at state x."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"state {x} outside [0, 1)")
    frame = _set_frame(p)
    pair = _stationary(frame, lam1, x)
    if pair is None:
        raise DomainError("no stationary pair exists at this state and multiplier")
    return _crossover(frame, lam1, x, pair, root)


def optimal_voltage_at_state(p: BalanceParams, bounds: VoltageBounds, lam1: float,
                             x: float) -> float:
    """Band minimizer of the raising density at state x."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"state {x} outside [0, 1)")
    u, _ = _level(_set_frame(p), bounds.v1_mag, bounds.v2_mag, lam1, x)
    return u


def classify_regime(p: BalanceParams, spec: TransitionSpec, bounds: VoltageBounds,
                    t_total: float) -> BalanceDecision:
    """Protocol regime for a budget.

    The edge bias v1^2 e^(-eta v1) - v2^2 e^(-eta v2) compares the two
    band edges at zero multiplier. Nonnegative bias: the ceiling is
    unconditionally optimal, so every feasible budget gets a floor-width
    ceiling pulse plus rest. Negative bias: the floor wins when the
    budget affords its pulse; in between, the budget binds and the drive
    follows the multiplier-governed level schedule.
    """
    frame = _frame(p, spec)
    v1, v2 = bounds.v1_mag, bounds.v2_mag
    t_min = frame.tau(v2) * math.log((1.0 - frame.y_i) / (1.0 - frame.y_f))
    bias = v1 * v1 * math.exp(-frame.eta * v1) - v2 * v2 * math.exp(-frame.eta * v2)
    t_lower = None
    if bias < 0.0:
        t_lower = frame.tau(v1) * math.log((1.0 - frame.y_i) / (1.0 - frame.y_f))
    if t_total < t_min:
        return BalanceDecision(False, None, t_min, t_lower, bias, t_min)
    if t_total == t_min:
        return BalanceDecision(True, BalanceCase.EXACT_MAX_PULSE, t_min, t_lower, bias, t_min)
    if bias >= 0.0:
        return BalanceDecision(True, BalanceCase.MAX_PULSE_REST, t_min, None, bias, t_min)
    assert t_lower is not None
    if t_total < t_lower:
        return BalanceDecision(True, BalanceCase.LEVEL_SCHEDULE, t_min, t_lower, bias, t_min)
    return BalanceDecision(True, BalanceCase.LOWER_PULSE_REST, t_min, t_lower, bias, t_min)


@dataclass(frozen=True)
class _SchedulePiece:
    ya: float
    yb: float
    branch: str
    duration: float
    energy: float


def _refine_boundary(frame: _Frame, v1: float, v2: float, lam1: float,
                     ya: float, yb: float, root: RootConfig) -> float:
    """Bisect the branch change inside (ya, yb); resolved far beyond the
    1e-6 relative state accuracy the exported switch time needs, so the
    schedule time is grid independent."""
    ida = _level(frame, v1, v2, lam1, ya, root)[1]
    lo, hi = float(ya), float(yb)
    while hi - lo > 1e-13 * max(abs(hi), 1e-3):
        mid = 0.5 * (lo + hi)
        if _level(frame, v1, v2, lam1, mid, root)[1] == ida:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _schedule(frame: _Frame, bounds: VoltageBounds, lam1: float, quad: QuadConfig,
              root: RootConfig, scan_points: int) -> tuple[list[_SchedulePiece], float, float]:
    """Piecewise schedule for a multiplier: pieces in traversal order plus
    total switching time and energy. Branch changes are located on a scan
    grid and refined; constant-level pieces use closed forms, stationary
    pieces adaptive quadrature."""
    v1, v2 = bounds.v1_mag, bounds.v2_mag
    ys = [frame.y_i + (frame.y_f - frame.y_i) * k / (scan_points - 1)
          for k in range(scan_points)]
    ids = [_level(frame, v1, v2, lam1, y, root)[1] for y in ys]
    boundaries = [frame.y_i]
    for k in range(scan_points - 1):
        if ids[k] != ids[k + 1]:
            boundaries.append(_refine_boundary(frame, v1, v2, lam1, ys[k], ys[k + 1], root))
    boundaries.append(frame.y_f)

    pieces: list[_SchedulePiece] = []
    tc = 0.0
    energy = 0.0
    for ya, yb in zip(boundaries[:-1], boundaries[1:]):
        mid = 0.5 * (ya + yb)
        u_mid, branch = _level(frame, v1, v2, lam1, mid, root)
        if branch in ("max", "min"):
            log = math.log((1.0 - ya) / (1.0 - yb))
            tau = frame.tau(u_mid)
            d = tau * log
            e = u_mid * u_mid * tau * (frame.gb * log - (frame.gb - frame.ga) * (yb - ya))
        else:
            def u_of(y: float) -> float:
                return _level(frame, v1, v2, lam1, y, root)[0]

            d = integrate_1d(lambda y: frame.tau(u_of(y)) / (1.0 - y), ya, yb, quad)
            e = integrate_1d(
                lambda y: frame.tau(u_of(y)) * frame.g_of(y) * u_of(y) ** 2 / (1.0 - y),
                ya, yb, quad)
        pieces.append(_SchedulePiece(float(ya), float(yb), branch, float(d), float(e)))
        tc += d
        energy += e
    return pieces, float(tc), float(energy)


def switching_time(p: BalanceParams, spec: TransitionSpec, bounds: VoltageBounds,
                   lam1: float, quad: QuadConfig = QuadConfig(),
                   root: RootConfig = RootConfig(), scan_points: int = 1001) -> float:
    """Active switching time of the level schedule for a multiplier;
    decreasing in lam1 down to the ceiling pulse width."""
    frame = _frame(p, spec)
    return _schedule(frame, bounds, lam1, quad, root, scan_points)[1]


def solve_multiplier(p: BalanceParams, spec: TransitionSpec, bounds: VoltageBounds,
                     t_total: float, root: RootConfig = RootConfig(),
                     quad: QuadConfig = QuadConfig(), scan_points: int = 1001) -> float:
    """Multiplier whose schedule exhausts the budget.

    Defined for negative edge bias and budgets in (t_min, t_lower]; the
    upper edge returns exactly 0.
    """
    decision = classify_regime(p, spec, bounds, t_total)
    if decision.edge_bias >= 0.0:
        raise RegimeError("the band makes the ceiling unconditionally optimal")
    assert decision.t_lower is not None
    if not decision.feasible or t_total == decision.t_min or t_total > decision.t_lower:
        raise RegimeError(
            f"budget {t_total} s outside ({decision.t_min}, {decision.t_lower}] s")
    if t_total == decision.t_lower:
        return 0.0
    frame = _frame(p, spec)
    cap = max(frame.g_of(frame.y_i), frame.g_of(frame.y_f)) / frame.eta**2

    def slack(lam: float) -> float:
        return _schedule(frame, bounds, lam, quad, root, scan_points)[1] - t_total

    return find_root(slack, 0.0, cap, root)


def _constant_profile(p: BalanceParams, spec: TransitionSpec, frame: _Frame, level_mag: float,
                      t_total: float, case: BalanceCase, lam1: float, min_t: float,
                      grid_points: int) -> tuple[StateProfile, SynthesisReport]:
    xa, xb = sorted((spec.x_i, spec.x_f))
    tc, energy = _balance_level(p, spec.direction, xa, xb, level_mag)
    v = frame.sgn * level_mag
    states = np.linspace(spec.x_i, spec.x_f, grid_points)
    profile = StateProfile(direction=spec.direction, states=states,
                           voltages=np.full(grid_points, v), case=case.value,
                           lam1=lam1, tc=tc, t_total=t_total,
                           voltage_of_state=lambda x, _v=v: _v, events=[])
    report = SynthesisReport(case=case.value, lam1=lam1, tc=tc, energy=energy,
                             feasible=True, min_t=min_t)
    return profile, report


def synthesize(p: BalanceParams, spec: TransitionSpec, bounds: VoltageBounds, t_total: float,
               *, grid_points: int = 1001, root: RootConfig = RootConfig(),
               quad: QuadConfig = QuadConfig()) -> tuple[StateProfile, SynthesisReport]:
    """Minimum-energy drive schedule for the task, with its report.

    Warns when the budget is not small against the zero-bias relaxation
    scales, where the one-sided approximation loses accuracy.
    """
    decision = classify_regime(p, spec, bounds, t_total)
    if not decision.feasible:
        raise InfeasibleError(
            f"budget {t_total} s below the minimum switching time {decision.t_min} s",
            min_duration=decision.t_min)
    if t_total > 0.3 * min(p.tau0_set, p.tau0_reset):
        warnings.warn(
            "the budget is comparable to the zero-bias relaxation scales; "
            "the one-sided schedule may be inaccurate under the full dynamics",
            OneSidedValidityWarning, stacklevel=2)

    frame = _frame(p, spec)
    case = decision.case
    assert case is not None
    if case in (BalanceCase.EXACT_MAX_PULSE, BalanceCase.MAX_PULSE_REST):
        profile, report = _constant_profile(p, spec, frame, bounds.v2_mag, t_total,
                                            case, 0.0, decision.t_min, grid_points)
    elif case is BalanceCase.LOWER_PULSE_REST:
        profile, report = _constant_profile(p, spec, frame, bounds.v1_mag, t_total,
                                            case, 0.0, decision.t_min, grid_points)
    else:
        lam1 = solve_multiplier(p, spec, bounds, t_total, root, quad, grid_points)
        pieces, tc, energy = _schedule(frame, bounds, lam1, quad, root, grid_points)

        def v_of_state(x: float) -> float:
            y = x if frame.sgn > 0 else 1.0 - x
            return frame.sgn * _level(frame, bounds.v1_mag, bounds.v2_mag, lam1, y, root)[0]

        events = []
        elapsed = 0.0
        eps = 1e-9 * abs(frame.y_f - frame.y_i)
        for left, right in zip(pieces[:-1], pieces[1:]):
            elapsed += left.duration
            y_b = left.yb
            vb = frame.sgn * _level(frame, bounds.v1_mag, bounds.v2_mag, lam1,
                                    max(y_b - eps, left.ya), root)[0]
            va = frame.sgn * _level(frame, bounds.v1_mag, bounds.v2_mag, lam1,
                                    min(y_b + eps, right.yb), root)[0]
            events.append(ProfileEvent(kind="level_switch", state=float(frame.to_state(y_b)),
                                       time_s=float(elapsed), v_before=float(vb),
                                       v_after=float(va)))

        states = np.linspace(spec.x_i, spec.x_f, grid_points)
        voltages = np.array([v_of_state(x) for x in states])
        profile = StateProfile(direction=spec.direction, states=states, voltages=voltages,
                               case=case.value, lam1=lam1, tc=tc, t_total=t_total,
                               voltage_of_state=v_of_state, events=events)
        report = SynthesisReport(case=case.value, lam1=lam1, tc=tc, energy=energy,
                                 feasible=True, min_t=decision.t_min)
    return profile, report
