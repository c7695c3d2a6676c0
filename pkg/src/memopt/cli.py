"""Batch command line front end.

Subcommands: synthesize, simulate, sweep, compare. Configuration is a
single JSON document (schema in the README); outputs are CSV and JSON
with 17-significant-digit float formatting, so identical inputs give
byte-identical files. Exit codes: 0 success, 1 usage or runtime error,
2 physical infeasibility (budget below the minimum switching time).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import min_switch_time, pulse, synthesize, voltage_for_time
from .closed_form import Direction, InfeasibleError, TransitionSpec
from .models import BalanceParams, VteamParams
from .numerics import QuadConfig, RootConfig
from .profiles import ProfileEvent, VoltageBounds
from .simulate import SolverConfig, simulate
from .waveform import Protocol, Segment, profile_to_protocol


class ConfigError(ValueError):
    """The configuration document violates the schema."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_value(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        return _fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(pad + _json_value(v, indent + 1) for v in obj)
        return "[\n" + items + "\n" + "  " * indent + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            pad + json.dumps(str(k)) + ": " + _json_value(v, indent + 1)
            for k, v in sorted(obj.items()))
        return "{\n" + items + "\n" + "  " * indent + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: Path, obj) -> None:
    path.write_text(_json_value(obj, 0) + "\n")


def write_csv(path: Path, header: list[str], rows, comments: list[str] = ()) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating)) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class NumericsConfig:
    grid_points: int = 1001
    segments: int = 1000
    quad_rel_tol: float = 1e-10
    root_rel_tol: float = 1e-10
    solver_steps: int = 100_000
    balance_rate: str = "full"
    trace_max_samples: int = 20_001

    def quad(self) -> QuadConfig:
        return QuadConfig(rel_tol=self.quad_rel_tol)

    def root(self) -> RootConfig:
        return RootConfig(rel_tol=self.root_rel_tol)

    def solver(self, balance_rate: str | None = None) -> SolverConfig:
        return SolverConfig(total_steps=self.solver_steps,
                            balance_rate=balance_rate or self.balance_rate,
                            max_samples=self.trace_max_samples)


@dataclass(frozen=True)
class RunConfig:
    params: VteamParams | BalanceParams
    spec: TransitionSpec
    t_total: float
    bounds: VoltageBounds
    numerics: NumericsConfig
    out_dir: Path


_MODEL_FIELDS = {
    "vteam": ("k_off", "k_on", "alpha_off", "alpha_on", "v_off", "v_on",
              "w_on", "w_off", "g_min", "g_max"),
    "balance": ("tau0_set", "tau0_reset", "eta_set", "eta_reset", "g_min", "g_max"),
}
_TASK_FIELDS = ("direction", "x_i", "x_f", "t_total_s", "v1_mag", "v2_mag")
_NUMERICS_FIELDS = ("grid_points", "segments", "quad_rel_tol", "root_rel_tol",
                    "solver_steps", "balance_rate", "trace_max_samples")


def _expect_keys(section: dict, name: str, allowed, required) -> None:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    missing = set(required) - set(section)
    if missing:
        raise ConfigError(f"missing keys in {name!r}: {sorted(missing)}")


def load_config(path: str | Path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("the config document must be a JSON object")
    _expect_keys(doc, "config", ("model", "task", "numerics", "output"), ("model", "task"))

    model = doc["model"]
    kind = model.get("kind")
    if kind not in _MODEL_FIELDS:
        raise ConfigError(f"model.kind must be 'vteam' or 'balance', got {kind!r}")
    fields = _MODEL_FIELDS[kind]
    _expect_keys(model, "model", ("kind", *fields), ("kind", *fields))
    try:
        values = {k: float(model[k]) for k in fields}
        params = VteamParams(**values) if kind == "vteam" else BalanceParams(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc

    task = doc["task"]
    _expect_keys(task, "task", _TASK_FIELDS, _TASK_FIELDS)
    try:
        spec = TransitionSpec(Direction(task["direction"]),
                              float(task["x_i"]), float(task["x_f"]))
        bounds = VoltageBounds(float(task["v1_mag"]), float(task["v2_mag"]))
        t_total = float(task["t_total_s"])
        if not t_total > 0:
            raise ValueError("t_total_s must be positive")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid task: {exc}") from exc

    numerics_doc = doc.get("numerics", {})
    _expect_keys(numerics_doc, "numerics", _NUMERICS_FIELDS, ())
    try:
        numerics = NumericsConfig(**{
            k: (int(v) if k in ("grid_points", "segments", "solver_steps",
                                "trace_max_samples") else
                str(v) if k == "balance_rate" else float(v))
            for k, v in numerics_doc.items()})
        numerics.solver()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid numerics: {exc}") from exc

    output = doc.get("output", {})
    _expect_keys(output, "output", ("out_dir",), ())
    out_dir = Path(output.get("out_dir", "out"))
    return RunConfig(params=params, spec=spec, t_total=t_total, bounds=bounds,
                     numerics=numerics, out_dir=out_dir)


def _report_dict(case, lam1, tc, energy, feasible, min_t) -> dict:
    return {"case": case, "lambda1_SV2": lam1, "tc_s": tc, "energy_J": energy,
            "feasible": feasible, "min_T_s": min_t}


def _model_kind(params) -> str:
    return "vteam" if isinstance(params, VteamParams) else "balance"


def write_protocol_csv(path: Path, protocol: Protocol, cfg: RunConfig,
                       lam1: float, tc: float) -> None:
    comments = [
        f"model={_model_kind(cfg.params)}",
        f"direction={cfg.spec.direction.value}",
        f"x0={_fmt(cfg.spec.x_i)}",
        f"case={protocol.case}",
        f"lambda1_SV2={_fmt(lam1)}",
        f"tc_s={_fmt(tc)}",
        f"t_total_s={_fmt(cfg.t_total)}",
    ]
    for ev in protocol.events:
        comments.append(
            f"event kind={ev.kind} state={_fmt(ev.state)} t_s={_fmt(ev.time_s)} "
            f"v_before_V={_fmt(ev.v_before)} v_after_V={_fmt(ev.v_after)}")
    rows = [(seg.duration, seg.voltage) for seg in protocol.segments]
    write_csv(path, ["duration_s", "voltage_V"], rows, comments)


def read_protocol_csv(path: str | Path) -> Protocol:
    case = ""
    events: list[ProfileEvent] = []
    segments: list[Segment] = []
    header_seen = False
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("event "):
                kv = dict(piece.split("=", 1) for piece in body[len("event "):].split())
                events.append(ProfileEvent(kind=kv["kind"], state=float(kv["state"]),
                                           time_s=float(kv["t_s"]),
                                           v_before=float(kv["v_before_V"]),
                                           v_after=float(kv["v_after_V"])))
            elif body.startswith("case="):
                case = body.split("=", 1)[1]
            continue
        if not header_seen:
            if line != "duration_s,voltage_V":
                raise ValueError(f"unexpected protocol header {line!r}")
            header_seen = True
            continue
        dur_s, volt_s = line.split(",")
        segments.append(Segment(float(dur_s), float(volt_s)))
    if not segments:
        raise ValueError(f"no segments found in {path}")
    return Protocol(segments=segments, case=case, events=events)


def cmd_synthesize(cfg: RunConfig, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        profile, report = synthesize(cfg.params, cfg.spec, cfg.bounds, cfg.t_total,
                                     grid_points=cfg.numerics.grid_points,
                                     root=cfg.numerics.root(), quad=cfg.numerics.quad())
    except InfeasibleError as exc:
        write_json(out_dir / "report.json",
                   _report_dict(None, None, None, None, False, exc.min_duration))
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    protocol = profile_to_protocol(cfg.params, profile, segments=cfg.numerics.segments,
                                   quad=cfg.numerics.quad())
    write_protocol_csv(out_dir / "protocol.csv", protocol, cfg, report.lam1, report.tc)
    write_csv(out_dir / "profile.csv", ["x", "v_V"],
              zip(profile.states, profile.voltages),
              [f"case={profile.case}"])
    write_json(out_dir / "report.json",
               _report_dict(report.case, report.lam1, report.tc, report.energy,
                            True, report.min_t))
    return 0


def cmd_simulate(cfg: RunConfig, protocol_path: str, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    protocol = read_protocol_csv(protocol_path)
    trace = simulate(cfg.params, protocol, cfg.spec.x_i, cfg.numerics.solver())
    write_csv(out_dir / "trace.csv", ["t_s", "v_V", "x", "i_A", "p_W", "q_J"],
              zip(trace.t, trace.v, trace.x, trace.i, trace.p, trace.q),
              [f"model={_model_kind(cfg.params)}", f"protocol={protocol_path}"])
    summary = {
        "final_x": trace.final_x,
        "final_energy_J": trace.final_energy,
        "total_duration_s": protocol.total_duration,
        "level_switches": [
            {"kind": ev.kind, "t_s": ev.time_s, "state": ev.state,
             "v_before_V": ev.v_before, "v_after_V": ev.v_after}
            for ev in protocol.events],
    }
    write_json(out_dir / "summary.json", summary)
    return 0


def _sweep_grid(lo: float, hi: float, points: int, log: bool) -> np.ndarray:
    if points < 1:
        raise ConfigError("points must be at least 1")
    if points == 1:
        return np.array([lo])
    if log:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def cmd_sweep(cfg: RunConfig, axis: str, lo: float, hi: float, points: int,
              log: bool, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    if axis == "T":
        header = ["t_s", "const_v_V", "const_q_J", "const_feasible",
                  "opt_case", "opt_lambda1_SV2", "opt_tc_s", "opt_q_J", "opt_feasible"]
        for t in _sweep_grid(lo, hi, points, log):
            t = float(t)
            try:
                v0 = voltage_for_time(cfg.params, cfg.spec, t)
                if abs(v0) > cfg.bounds.v2_mag * (1 + 1e-12):
                    raise InfeasibleError("amplitude above the ceiling")
                const_q, const_v, const_ok = pulse(cfg.params, cfg.spec, v0).energy, v0, True
            except InfeasibleError:
                const_q, const_v, const_ok = math.nan, math.nan, False
            try:
                _, rep = synthesize(cfg.params, cfg.spec, cfg.bounds, t,
                                    grid_points=cfg.numerics.grid_points,
                                    root=cfg.numerics.root(), quad=cfg.numerics.quad())
                rows.append((t, const_v, const_q, const_ok, rep.case, rep.lam1,
                             rep.tc, rep.energy, True))
            except InfeasibleError:
                rows.append((t, const_v, const_q, const_ok, "infeasible",
                             math.nan, math.nan, math.nan, False))
    elif axis == "V0":
        header = ["v0_V", "t_s", "q_J", "feasible"]
        sgn = 1.0
        if (isinstance(cfg.params, VteamParams) and cfg.spec.direction is Direction.SET) or \
           (isinstance(cfg.params, BalanceParams) and cfg.spec.direction is Direction.RESET):
            sgn = -1.0
        for u in _sweep_grid(lo, hi, points, log):
            v0 = sgn * float(u)
            try:
                res = pulse(cfg.params, cfg.spec, v0)
                rows.append((v0, res.duration, res.energy, True))
            except InfeasibleError:
                rows.append((v0, math.nan, math.nan, False))
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    write_csv(out_dir / "sweep.csv", header, rows,
              [f"model={_model_kind(cfg.params)}", f"axis={axis}"])
    return 0


def cmd_compare(cfg: RunConfig, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        profile, report = synthesize(cfg.params, cfg.spec, cfg.bounds, cfg.t_total,
                                     grid_points=cfg.numerics.grid_points,
                                     root=cfg.numerics.root(), quad=cfg.numerics.quad())
        v0 = voltage_for_time(cfg.params, cfg.spec, cfg.t_total)
        if abs(v0) > cfg.bounds.v2_mag * (1 + 1e-12):
            raise InfeasibleError("constant amplitude above the ceiling",
                                  min_duration=report.min_t)
    except InfeasibleError as exc:
        write_json(out_dir / "compare.json",
                   {"feasible": False, "min_T_s": exc.min_duration})
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2

    opt_protocol = profile_to_protocol(cfg.params, profile, segments=cfg.numerics.segments,
                                       quad=cfg.numerics.quad())
    const_protocol = Protocol(segments=[Segment(cfg.t_total, v0)], case="constant")
    const_pred = pulse(cfg.params, cfg.spec, v0).energy

    # validation runs use the rate the synthesis is built on: the balance
    # schedule is one-sided by construction
    if isinstance(cfg.params, BalanceParams):
        rate = "set_only" if cfg.spec.direction is Direction.SET else "reset_only"
        solver = cfg.numerics.solver(balance_rate=rate)
    else:
        solver = cfg.numerics.solver()
    const_trace = simulate(cfg.params, const_protocol, cfg.spec.x_i, solver)
    opt_trace = simulate(cfg.params, opt_protocol, cfg.spec.x_i, solver)

    doc = {
        "task": {"direction": cfg.spec.direction.value, "x_i": cfg.spec.x_i,
                 "x_f": cfg.spec.x_f, "t_total_s": cfg.t_total},
        "entries": [
            {"label": "constant", "amplitude_V": v0,
             "predicted_energy_J": const_pred,
             "simulated_energy_J": const_trace.final_energy,
             "final_x": const_trace.final_x},
            {"label": "optimal", "case": report.case,
             "lambda1_SV2": report.lam1, "tc_s": report.tc,
             "predicted_energy_J": report.energy,
             "simulated_energy_J": opt_trace.final_energy,
             "final_x": opt_trace.final_x},
        ],
        "ratios": {
            "constant_over_optimal_predicted": const_pred / report.energy,
            "constant_over_optimal_simulated":
                const_trace.final_energy / opt_trace.final_energy,
        },
        "feasible": True,
    }
    write_json(out_dir / "compare.json", doc)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="memopt",
        description="Energy-optimal programming protocols for first-order memristive devices")
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="synthesize the optimal protocol")
    p_syn.add_argument("--config", required=True)
    p_syn.add_argument("--out-dir")

    p_sim = sub.add_parser("simulate", help="simulate a protocol file")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--protocol", required=True)
    p_sim.add_argument("--out-dir")

    p_sweep = sub.add_parser("sweep", help="sweep the budget or the pulse amplitude")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", required=True, choices=["T", "V0"])
    p_sweep.add_argument("--from", dest="lo", type=float, required=True)
    p_sweep.add_argument("--to", dest="hi", type=float, required=True)
    p_sweep.add_argument("--points", type=int, required=True)
    p_sweep.add_argument("--log", action="store_true")
    p_sweep.add_argument("--out-dir")

    p_cmp = sub.add_parser("compare", help="constant vs optimal, end to end")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--out-dir")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out_dir) if args.out_dir else cfg.out_dir
        if args.command == "synthesize":
            return cmd_synthesize(cfg, out_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.protocol, out_dir)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.axis, args.lo, args.hi, args.points,
                             args.log, out_dir)
        if args.command == "compare":
            return cmd_compare(cfg, out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
