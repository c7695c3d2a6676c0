"""Protocol validation by direct integration of the device state equation.

Independent of the synthesis math: the state is stepped numerically under
the piecewise-constant drive (segment boundaries are always step
boundaries) and energy accumulates by trapezoid quadrature of G(x) V^2.
The balance model defaults to its full two-term rate; one-sided modes
are available to check protocols against the approximation that produced
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import TransitionSpec
from .models import (
    BalanceParams,
    VteamParams,
    admissible_interval,
    balance_memductance,
    balance_state_rate,
    vteam_memductance,
    vteam_state_rate,
)
from .numerics import integrate_ode
from .waveform import Protocol


@dataclass(frozen=True)
class SolverConfig:
    total_steps: int = 100_000          # fixed-mode step budget over the whole protocol
    min_steps_per_segment: int = 8
    mode: str = "fixed"                 # "fixed" | "adaptive"
    adaptive_tol: float = 1e-10
    balance_rate: str = "full"          # "full" | "set_only" | "reset_only"
    max_samples: int = 250_000          # trace thinning bound

    def __post_init__(self) -> None:
        if self.total_steps < 1 or self.min_steps_per_segment < 1:
            raise ValueError("step counts must be positive")
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.balance_rate not in ("full", "set_only", "reset_only"):
            raise ValueError(f"unknown balance rate mode {self.balance_rate!r}")


@dataclass
class SimulationTrace:
    t: np.ndarray   # s, strictly increasing
    v: np.ndarray   # V
    x: np.ndarray
    i: np.ndarray   # A, G(x) V at every sample
    p: np.ndarray   # W
    q: np.ndarray   # J, cumulative, nondecreasing

    @property
    def final_x(self) -> float:
        return float(self.x[-1])

    @property
    def final_energy(self) -> float:
        return float(self.q[-1])

    def time_of_state(self, x_target: float) -> float:
        """First time the trace crosses x_target, linearly interpolated."""
        xs = self.x
        for k in range(len(xs) - 1):
            lo, hi = sorted((xs[k], xs[k + 1]))
            if lo <= x_target <= hi and xs[k] != xs[k + 1]:
                frac = (x_target - xs[k]) / (xs[k + 1] - xs[k])
                return float(self.t[k] + frac * (self.t[k + 1] - self.t[k]))
        raise ValueError(f"the trace never reaches state {x_target}")


def _conductance(params, x: float) -> float:
    if isinstance(params, VteamParams):
        return vteam_memductance(params, x)
    return balance_memductance(params, x)


def _make_rate(params, cfg: SolverConfig):
    if isinstance(params, VteamParams):
        return lambda x, v: vteam_state_rate(params, x, v)
    return lambda x, v: balance_state_rate(params, x, v, cfg.balance_rate)


def simulate(params, protocol: Protocol, x0: float,
             cfg: SolverConfig = SolverConfig()) -> SimulationTrace:
    """Integrate the protocol from x0 and return the sampled trace.

    Fixed mode allocates the step budget across segments in proportion to
    duration (never below the per-segment floor) and steps with the
    classical 4th-order rule; adaptive mode uses the embedded pair per
    segment. The state is clamped to the admissible interval after every
    step.
    """
    lo, hi = admissible_interval(params)
    if not lo <= x0 <= hi:
        raise ValueError(f"x0 = {x0} outside the admissible interval [{lo}, {hi}]")
    rate = _make_rate(params, cfg)
    total = protocol.total_duration

    ts = [0.0]
    vs = [protocol.segments[0].voltage if protocol.segments else 0.0]
    xs = [float(x0)]
    qs = [0.0]

    t_base = 0.0
    x = float(x0)
    q = 0.0
    stride = max(1, int(math.ceil(cfg.total_steps / cfg.max_samples)))

    for seg in protocol.segments:
        v = seg.voltage

        def f(x_: float) -> float:
            return rate(x_, v)

        if cfg.mode == "fixed":
            n = max(cfg.min_steps_per_segment,
                    int(round(cfg.total_steps * seg.duration / total)))
            h = seg.duration / n
            p_prev = _conductance(params, x) * v * v
            for k in range(n):
                k1 = f(x)
                k2 = f(min(max(x + 0.5 * h * k1, lo), hi))
                k3 = f(min(max(x + 0.5 * h * k2, lo), hi))
                k4 = f(min(max(x + h * k3, lo), hi))
                x = x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
                x = min(max(x, lo), hi)
                p_new = _conductance(params, x) * v * v
                q += 0.5 * h * (p_prev + p_new)
                p_prev = p_new
                if (k + 1) % stride == 0 or k == n - 1:
                    ts.append(t_base + (k + 1) * h)
                    vs.append(v)
                    xs.append(x)
                    qs.append(q)
        else:
            seg_t, seg_x = integrate_ode(lambda t_, x_: f(x_), x, 0.0, seg.duration,
                                         tol=cfg.adaptive_tol, clamp=(lo, hi))
            powers = [_conductance(params, float(xk)) * v * v for xk in seg_x]
            for k in range(1, len(seg_t)):
                q += 0.5 * (seg_t[k] - seg_t[k - 1]) * (powers[k] + powers[k - 1])
                ts.append(t_base + float(seg_t[k]))
                vs.append(v)
                xs.append(float(seg_x[k]))
                qs.append(q)
            x = float(seg_x[-1])
        t_base += seg.duration

    t = np.asarray(ts)
    v_arr = np.asarray(vs)
    x_arr = np.asarray(xs)
    g = np.array([_conductance(params, float(xk)) for xk in x_arr])
    i_arr = g * v_arr
    p_arr = g * v_arr * v_arr
    return SimulationTrace(t=t, v=v_arr, x=x_arr, i=i_arr, p=p_arr, q=np.asarray(qs))


def compare(params, spec: TransitionSpec, protocols: list[Protocol],
            cfg: SolverConfig = SolverConfig(),
            labels: list[str] | None = None) -> list[dict]:
    """Simulate protocols sharing a task and tabulate energies against the
    first entry."""
    if labels is None:
        labels = [f"protocol_{k}" for k in range(len(protocols))]
    records = []
    base_energy = None
    for label, protocol in zip(labels, protocols):
        trace = simulate(params, protocol, spec.x_i, cfg)
        if base_energy is None:
            base_energy = trace.final_energy
        records.append({
            "label": label,
            "energy_j": trace.final_energy,
            "final_x": trace.final_x,
            "final_state_error": abs(trace.final_x - spec.x_f),
            "energy_ratio_vs_first": (trace.final_energy / base_energy
                                      if base_energy else math.nan),
        })
    return records
