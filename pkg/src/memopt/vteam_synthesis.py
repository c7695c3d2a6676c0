"""Constrained minimum-energy protocol synthesis for the threshold model.

Dissipation per unit state advance is G(w) V^2 / f(w, V); adding a
nonnegative multiplier lam1 on the time-budget constraint and minimizing
pointwise over the admissible band [V1, V2] yields, for exponents below
2, an interior stationary magnitude

    u(w) = (v + sqrt(v^2 + lam1 a (2 - a) / G(w))) / (2 - a)

clamped into the band. lam1 = 0 recovers the unconstrained optimum
2 v / (2 - a); growing lam1 raises the profile toward the ceiling and
shrinks the active switching time, which pins lam1 against the budget
whenever the budget binds. For exponents >= 2 the ceiling is always
optimal and no multiplier is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import (
    Direction,
    InfeasibleError,
    TransitionSpec,
    _vteam_drive,
    _vteam_piece,
    check_vteam_transition,
    vteam_unconstrained_optimum,
)
from .models import VteamParams, vteam_memductance
from .numerics import QuadConfig, RootConfig, find_root, integrate_1d
from .profiles import ProfileEvent, RegimeCase, StateProfile, SynthesisReport, VoltageBounds


class RegimeError(ValueError):
    """The requested operation is undefined in the classified regime."""


@dataclass(frozen=True)
class RegimeDecision:
    feasible: bool
    case: RegimeCase | None
    t_min: float               # pulse width at the ceiling; feasibility floor
    t_star: float | None       # pulse width at the best sub-ceiling level, when one exists
    required_min: float

    @property
    def interior_window(self) -> tuple[float, float] | None:
        """Budget interval on which the state-feedback regime applies."""
        if self.t_star is None:
            return None
        return self.t_min, self.t_star


def _check_bounds(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds) -> None:
    _, _, v_thr, _ = _vteam_drive(p, spec.direction)
    if bounds.v1_mag < v_thr:
        raise ValueError(
            f"band floor {bounds.v1_mag} V sits below the {spec.direction.value} "
            f"threshold magnitude {v_thr} V")


def interior_voltage(p: VteamParams, direction: Direction, lam1: float, w: float) -> float:
    """Signed stationary drive level at state w for multiplier lam1.

    Defined for exponents below 2; reduces to the unconstrained optimum at
    lam1 = 0 and grows with lam1, staying beyond the threshold.
    """
    _, alpha, v_thr, sgn = _vteam_drive(p, direction)
    if alpha >= 2.0:
        raise RegimeError("the stationary level exists only for exponents below 2")
    if lam1 < 0.0:
        raise ValueError("the multiplier must be nonnegative")
    g = vteam_memductance(p, w)
    u = (v_thr + math.sqrt(v_thr * v_thr + lam1 * alpha * (2.0 - alpha) / g)) / (2.0 - alpha)
    return sgn * u


def _interior_u(p: VteamParams, drive, lam1: float, w: float) -> float:
    _, alpha, v_thr, _ = drive
    g = vteam_memductance(p, w)
    return (v_thr + math.sqrt(v_thr * v_thr + lam1 * alpha * (2.0 - alpha) / g)) / (2.0 - alpha)


def _u_hat(p: VteamParams, drive, bounds: VoltageBounds, lam1: float, w: float) -> float:
    """Band-clamped profile magnitude at state w."""
    u = _interior_u(p, drive, lam1, w)
    return min(max(u, bounds.v1_mag), bounds.v2_mag)


def _crossing_state(p: VteamParams, drive, lam1: float, level: float) -> float | None:
    """State at which the unclamped stationary level equals the given band
    level. None when the level never binds (below the unconstrained
    optimum, or lam1 = 0). States beyond the admissible range signal that
    the whole range sits on one side."""
    _, alpha, v_thr, _ = drive
    c = ((2.0 - alpha) * level - v_thr) ** 2 - v_thr * v_thr
    if lam1 <= 0.0 or c <= 0.0:
        return None
    g_c = lam1 * alpha * (2.0 - alpha) / c
    return p.w_on + p.span * (p.g_max - g_c) / (p.g_max - p.g_min)


def saturation_multiplier(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds) -> float:
    """Smallest multiplier pushing the whole profile to the ceiling.

    Any larger value yields the identical ceiling-level protocol, so this
    threshold is what gets reported at the feasibility floor.
    """
    check_vteam_transition(p, spec)
    _check_bounds(p, spec, bounds)
    drive = _vteam_drive(p, spec.direction)
    _, alpha, v_thr, _ = drive
    if alpha >= 2.0:
        raise RegimeError("the multiplier is not used for exponents of 2 or larger")
    c = ((2.0 - alpha) * bounds.v2_mag - v_thr) ** 2 - v_thr * v_thr
    if c <= 0.0:
        raise RegimeError("the ceiling sits at or below the unconstrained optimum")
    lo = min(spec.x_i, spec.x_f)
    return vteam_memductance(p, lo) * c / (alpha * (2.0 - alpha))


@dataclass(frozen=True)
class _Piece:
    wa: float
    wb: float
    duration: float
    energy: float
    u_mid: float


def _assemble(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds, lam1: float,
              quad: QuadConfig) -> tuple[float, float, list[_Piece], list[tuple[float, float]]]:
    """Piecewise switching time and energy of the clamped profile.

    Splits the state interval exactly at the band-clamp crossings so each
    piece is either a constant level (closed forms) or the smooth interior
    branch (adaptive quadrature). Returns (tc, energy, pieces ascending in
    w, interior cut states).
    """
    drive = _vteam_drive(p, spec.direction)
    kappa, alpha, v_thr, _ = drive
    lo, hi = sorted((spec.x_i, spec.x_f))
    cuts: list[tuple[float, float]] = []
    for level in (bounds.v1_mag, bounds.v2_mag):
        w_c = _crossing_state(p, drive, lam1, level)
        if w_c is not None and lo < w_c < hi:
            cuts.append((w_c, level))
    edges = sorted({lo, hi, *(w for w, _ in cuts)})

    def dist(w: float) -> float:
        return p.w_off - w if spec.direction is Direction.RESET else w - p.w_on

    def dwell(w: float) -> float:
        # time per unit state advance
        u = _u_hat(p, drive, bounds, lam1, w)
        return p.span / (kappa * (u / v_thr - 1.0) ** alpha * dist(w))

    def power_dwell(w: float) -> float:
        u = _u_hat(p, drive, bounds, lam1, w)
        return vteam_memductance(p, w) * u * u * p.span / (
            kappa * (u / v_thr - 1.0) ** alpha * dist(w))

    pieces: list[_Piece] = []
    tc = 0.0
    energy = 0.0
    for wa, wb in zip(edges[:-1], edges[1:]):
        u_mid = _u_hat(p, drive, bounds, lam1, 0.5 * (wa + wb))
        if u_mid == bounds.v1_mag or u_mid == bounds.v2_mag:
            d, e = _vteam_piece(p, spec.direction, wa, wb, u_mid)
        else:
            d = integrate_1d(dwell, wa, wb, quad)
            e = integrate_1d(power_dwell, wa, wb, quad)
        pieces.append(_Piece(wa, wb, d, e, u_mid))
        tc += d
        energy += e
    return tc, energy, pieces, sorted(cuts)


def switching_time(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds, lam1: float,
                   quad: QuadConfig = QuadConfig()) -> float:
    """Active switching time of the clamped profile for a given multiplier.

    Decreasing in lam1: a larger multiplier raises the drive everywhere,
    until saturation at the ceiling pins it at the feasibility floor.
    """
    check_vteam_transition(p, spec)
    _check_bounds(p, spec, bounds)
    return _assemble(p, spec, bounds, lam1, quad)[0]


def solve_multiplier(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds,
                     t_total: float, root: RootConfig = RootConfig(),
                     quad: QuadConfig = QuadConfig()) -> float:
    """Multiplier whose profile exhausts the budget: switching_time = t_total.

    Defined on the closed budget interval [t_min, t_star]; the lower edge
    returns the saturation threshold, the upper edge returns exactly 0.
    """
    decision = classify_regime(p, spec, bounds, t_total)
    if decision.t_star is None:
        raise RegimeError("no state-feedback regime exists for this parameter set")
    if not decision.feasible or t_total > decision.t_star:
        raise RegimeError(
            f"budget {t_total} s outside [{decision.t_min}, {decision.t_star}] s")
    if t_total == decision.t_star:
        return 0.0
    if t_total == decision.t_min:
        return saturation_multiplier(p, spec, bounds)
    lam_hi = saturation_multiplier(p, spec, bounds)
    return find_root(
        lambda lam: _assemble(p, spec, bounds, lam, quad)[0] - t_total,
        0.0, lam_hi, root)


def classify_regime(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds,
                    t_total: float) -> RegimeDecision:
    """Protocol regime for a budget, given the exponent and the band.

    Budgets below the ceiling pulse width are infeasible. At the floor
    exactly, the ceiling fills the window. Otherwise: when the ceiling is
    (weakly) optimal (exponent >= 2, or the interior optimum at or above
    the ceiling) the protocol is a floor-width ceiling pulse plus rest;
    when a sub-ceiling optimum exists, budgets beyond its pulse width get
    that pulse plus rest, and budgets in between bind the constraint and
    take the state-feedback profile.
    """
    check_vteam_transition(p, spec)
    _check_bounds(p, spec, bounds)
    _, alpha, v_thr, _ = _vteam_drive(p, spec.direction)
    lo, hi = sorted((spec.x_i, spec.x_f))
    t_min = _vteam_piece(p, spec.direction, lo, hi, bounds.v2_mag)[0]

    t_star: float | None = None
    if alpha < 2.0:
        level = min(max(2.0 * v_thr / (2.0 - alpha), bounds.v1_mag), bounds.v2_mag)
        if level < bounds.v2_mag:
            t_star = _vteam_piece(p, spec.direction, lo, hi, level)[0]

    if t_total < t_min:
        return RegimeDecision(False, None, t_min, t_star, t_min)
    if t_total == t_min:
        return RegimeDecision(True, RegimeCase.EXACT_MAX_PULSE, t_min, t_star, t_min)
    if t_star is None:
        return RegimeDecision(True, RegimeCase.MAX_PULSE_REST, t_min, None, t_min)
    if t_total < t_star:
        return RegimeDecision(True, RegimeCase.STATE_FEEDBACK, t_min, t_star, t_min)
    return RegimeDecision(True, RegimeCase.OPTIMAL_PULSE_REST, t_min, t_star, t_min)


def build_profile(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds, lam1: float,
                  t_total: float, case: RegimeCase, grid_points: int = 1001,
                  quad: QuadConfig = QuadConfig()) -> tuple[StateProfile, float]:
    """State-feedback profile for a given multiplier, with clamp events
    located exactly and timed along the traversal. Returns (profile,
    predicted active energy)."""
    drive = _vteam_drive(p, spec.direction)
    sgn = drive[3]
    tc, energy, pieces, cuts = _assemble(p, spec, bounds, lam1, quad)

    ordered = pieces if spec.direction is Direction.RESET else list(reversed(pieces))
    elapsed = 0.0
    boundary_time: dict[float, float] = {}
    for piece in ordered:
        elapsed += piece.duration
        boundary = piece.wb if spec.direction is Direction.RESET else piece.wa
        boundary_time[boundary] = elapsed

    def v_of_state(w: float) -> float:
        return sgn * _u_hat(p, drive, bounds, lam1, w)

    events = []
    eps = 1e-9 * p.span
    for w_c, level in cuts:
        before_state, after_state = w_c - eps, w_c + eps
        if spec.direction is Direction.SET:
            before_state, after_state = after_state, before_state
        vb = v_of_state(min(max(before_state, p.w_on), p.w_off))
        va = v_of_state(min(max(after_state, p.w_on), p.w_off))
        kind = "max_clamp" if level == bounds.v2_mag else "min_clamp"
        events.append(ProfileEvent(kind=kind, state=w_c, time_s=boundary_time[w_c],
                                   v_before=vb, v_after=va))
    events.sort(key=lambda ev: ev.time_s)

    states = np.linspace(spec.x_i, spec.x_f, grid_points)
    voltages = np.array([v_of_state(w) for w in states])
    profile = StateProfile(direction=spec.direction, states=states, voltages=voltages,
                           case=case.value, lam1=lam1, tc=tc, t_total=t_total,
                           voltage_of_state=v_of_state, events=events)
    return profile, energy


def _constant_profile(p: VteamParams, spec: TransitionSpec, level_mag: float, sgn: float,
                      tc: float, energy: float, t_total: float, case: RegimeCase,
                      lam1: float, grid_points: int) -> tuple[StateProfile, float]:
    states = np.linspace(spec.x_i, spec.x_f, grid_points)
    v = sgn * level_mag
    profile = StateProfile(direction=spec.direction, states=states,
                           voltages=np.full(grid_points, v), case=case.value,
                           lam1=lam1, tc=tc, t_total=t_total,
                           voltage_of_state=lambda w, _v=v: _v, events=[])
    return profile, energy


def synthesize(p: VteamParams, spec: TransitionSpec, bounds: VoltageBounds, t_total: float,
               *, grid_points: int = 1001, root: RootConfig = RootConfig(),
               quad: QuadConfig = QuadConfig()) -> tuple[StateProfile, SynthesisReport]:
    """Minimum-energy drive profile for the task, with its report.

    Raises InfeasibleError (carrying the floor) when the budget is shorter
    than the ceiling pulse width.
    """
    decision = classify_regime(p, spec, bounds, t_total)
    if not decision.feasible:
        raise InfeasibleError(
            f"budget {t_total} s below the minimum switching time {decision.t_min} s",
            min_duration=decision.t_min)
    drive = _vteam_drive(p, spec.direction)
    _, alpha, v_thr, sgn = drive
    lo, hi = sorted((spec.x_i, spec.x_f))

    case = decision.case
    assert case is not None
    if case is RegimeCase.STATE_FEEDBACK:
        lam1 = solve_multiplier(p, spec, bounds, t_total, root, quad)
        profile, energy = build_profile(p, spec, bounds, lam1, t_total, case,
                                        grid_points, quad)
    elif case is RegimeCase.OPTIMAL_PULSE_REST:
        level = min(max(2.0 * v_thr / (2.0 - alpha), bounds.v1_mag), bounds.v2_mag)
        tc, energy = _vteam_piece(p, spec.direction, lo, hi, level)
        profile, energy = _constant_profile(p, spec, level, sgn, tc, energy, t_total,
                                            case, 0.0, grid_points)
    else:
        # ceiling pulse, either exactly filling the window or followed by rest
        tc, energy = _vteam_piece(p, spec.direction, lo, hi, bounds.v2_mag)
        lam1 = 0.0
        if case is RegimeCase.EXACT_MAX_PULSE and decision.t_star is not None:
            lam1 = saturation_multiplier(p, spec, bounds)
        profile, energy = _constant_profile(p, spec, bounds.v2_mag, sgn, tc, energy,
                                            t_total, case, lam1, grid_points)

    report = SynthesisReport(case=profile.case, lam1=profile.lam1, tc=profile.tc,
                             energy=energy, feasible=True, min_t=decision.t_min)
    return profile, report
