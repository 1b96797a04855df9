"""Command-line front end for the allocation solvers and the simulator.

Subcommands::

    static-time     equal-split allocation under a total time budget
    static-latency  drop-or-serve allocation under a waiting cost
    dynamic         one finite-horizon solve of the arrival queue
    simulate        receding-horizon / greedy policy run, expected or sampled
    sweep           both policies across a grid of arrival rates
    arrival-rate    service time and rate keeping one task in queue

Every run prints a human-readable summary and, where applicable, writes CSV
files (``allocation.csv``, ``trace.csv``, ``sweep.csv``) whose header
comments echo the effective configuration.  Scenario options may come from
``--config FILE`` (flat ``key = value`` lines, unknown keys rejected) with
command-line flags taking precedence.  All floating-point output is printed
to 9 significant digits.  Exit codes: 0 success, 1 configuration error,
2 numeric or capacity error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .dynamic_solver import QueueParams, solve_finite_horizon
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    NoSolutionError,
    NumericError,
    OpqueueError,
)
from .sigmoid import DriftDiffusionModel, PewModel, SigmoidModel, value
from .simulator import SimConfig, benefit_sweep, optimal_arrival_rate, run_policy
from .static_solvers import solve_static_latency, solve_time_constrained

__all__ = ["ScenarioConfig", "run", "main"]

_KINDS = ("static-time", "static-latency", "dynamic", "simulate", "sweep", "arrival-rate")

# Option name -> (parser, belongs-to-kinds); None means every kind.
_FIELDS: dict[str, tuple] = {
    "pew": ("model", None),
    "ddm": ("model", None),
    "tasks": (int, ("static-time", "static-latency", "dynamic")),
    "budget": (float, ("static-time",)),
    "penalty": (float, None),
    "arrival_rate": (float, ("dynamic", "simulate")),
    "queue": (float, ("dynamic", "simulate", "sweep")),
    "horizon": (int, ("simulate", "sweep")),
    "stages": (int, ("simulate", "sweep")),
    "evolution": (str, ("simulate",)),
    "policy": (str, ("simulate",)),
    "seed": (int, ("simulate", "sweep")),
    "lambdas": ("floats", ("sweep",)),
    "output_dir": (str, None),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: problem kind, model, and its parameters."""

    kind: str
    pew: Optional[tuple[float, float, float]] = None
    ddm: Optional[tuple[float, float, float]] = None
    tasks: Optional[int] = None
    budget: Optional[float] = None
    penalty: Optional[float] = None
    arrival_rate: Optional[float] = None
    queue: float = 1.0
    horizon: int = 10
    stages: int = 100
    evolution: str = "expected"
    policy: str = "receding_horizon"
    seed: int = 0
    lambdas: Optional[tuple[float, ...]] = None
    output_dir: str = "."

    def model(self) -> SigmoidModel:
        if (self.pew is None) == (self.ddm is None):
            raise ConfigError("exactly one of 'pew' or 'ddm' must be given")
        try:
            if self.pew is not None:
                return PewModel(*self.pew)
            return DriftDiffusionModel(*self.ddm)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _parse_triple(text: str, name: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{name} expects three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _parse_floats(text: str, name: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if not values:
        raise ConfigError(f"{name} must list at least one number")
    return values


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read flat ``key = value`` lines; '#' starts a comment, blanks ignored."""
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _FIELDS and key != "kind":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = val.strip()
    return raw


def _coerce(kind: str, key: str, text: str):
    spec = _FIELDS[key][0]
    try:
        if spec == "model":
            return _parse_triple(text, key)
        if spec == "floats":
            return _parse_floats(text, key)
        return spec(text)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def build_config(kind: str, file_values: dict[str, str], flag_values: dict) -> ScenarioConfig:
    """Merge config-file values with flags (flags win) into a ScenarioConfig."""
    if kind not in _KINDS:
        raise ConfigError(f"unknown problem kind {kind!r}")
    merged: dict = {}
    file_kind = file_values.pop("kind", None)
    if file_kind is not None and file_kind != kind:
        raise ConfigError(
            f"config file is for kind {file_kind!r} but the subcommand is {kind!r}"
        )
    for key, text in file_values.items():
        merged[key] = _coerce(kind, key, text)
    for key, val in flag_values.items():
        if val is None:
            continue
        if key in ("pew", "ddm"):
            merged[key] = _parse_triple(val, key)
        elif key == "lambdas":
            merged[key] = _parse_floats(val, key)
        else:
            merged[key] = val
    if "pew" in merged and "ddm" in merged:
        # A flag model overrides a file model of the other family.
        if flag_values.get("pew") is not None and flag_values.get("ddm") is None:
            merged.pop("ddm")
        elif flag_values.get("ddm") is not None and flag_values.get("pew") is None:
            merged.pop("pew")
    try:
        return ScenarioConfig(kind=kind, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(config: ScenarioConfig) -> str:
    """Flat ``key = value`` text that parses back to an identical config."""
    lines = [f"kind = {config.kind}"]
    if config.pew is not None:
        lines.append("pew = " + ",".join(_fmt(v) for v in config.pew))
    if config.ddm is not None:
        lines.append("ddm = " + ",".join(_fmt(v) for v in config.ddm))
    for key in ("tasks", "budget", "penalty", "arrival_rate"):
        val = getattr(config, key)
        if val is not None:
            lines.append(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    lines.append(f"queue = {_fmt(config.queue)}")
    lines.append(f"horizon = {config.horizon}")
    lines.append(f"stages = {config.stages}")
    lines.append(f"evolution = {config.evolution}")
    lines.append(f"policy = {config.policy}")
    lines.append(f"seed = {config.seed}")
    if config.lambdas is not None:
        lines.append("lambdas = " + ",".join(_fmt(v) for v in config.lambdas))
    lines.append(f"output_dir = {config.output_dir}")
    return "\n".join(lines) + "\n"


def _header_lines(config: ScenarioConfig, units: list[str]) -> list[str]:
    lines = ["# effective configuration:"]
    lines += [f"# {line}" for line in serialize_config(config).strip().splitlines()]
    lines += [f"# {u}" for u in units]
    return lines


def _write_csv(path: Path, header_lines: list[str], columns: list[str], rows: list[list[str]]) -> None:
    out = "\n".join(header_lines) + "\n" + ",".join(columns) + "\n"
    out += "".join(",".join(row) + "\n" for row in rows)
    path.write_text(out, encoding="utf-8")


def _require(config: ScenarioConfig, *keys: str) -> None:
    for key in keys:
        if getattr(config, key) is None:
            raise ConfigError(f"{config.kind} requires '{key.replace('_', '-')}'")


def _allocation_csv(config, durations, rewards, penalties) -> None:
    rows = [
        [str(i + 1), _fmt(t), _fmt(r), _fmt(p)]
        for i, (t, r, p) in enumerate(zip(durations, rewards, penalties))
    ]
    _write_csv(
        Path(config.output_dir) / "allocation.csv",
        _header_lines(config, ["units: duration s; reward, penalty dimensionless"]),
        ["stage", "duration", "reward", "penalty"],
        rows,
    )


def _run_static_time(config: ScenarioConfig) -> None:
    _require(config, "tasks", "budget")
    model = config.model()
    allocation, reward, served = solve_time_constrained(model, config.tasks, config.budget)
    print(f"time-constrained queue: {config.tasks} tasks, budget {_fmt(config.budget)} s")
    print(f"serve {served} task(s) for {_fmt(config.budget / served)} s each, "
          f"drop {config.tasks - served}")
    print(f"total reward: {_fmt(reward.total)}")
    _allocation_csv(config, allocation.durations, reward.rewards, reward.penalties)


def _run_static_latency(config: ScenarioConfig) -> None:
    _require(config, "tasks", "penalty")
    model = config.model()
    allocation, reward = solve_static_latency(model, config.tasks, config.penalty)
    dropped = config.tasks - len(allocation.served_indices)
    print(f"latency-penalty queue: {config.tasks} tasks, penalty {_fmt(config.penalty)}/s")
    print(f"serve {len(allocation.served_indices)} task(s), drop {dropped}")
    for i, t in enumerate(allocation.durations, start=1):
        print(f"  stage {i}: {_fmt(t)} s")
    print(f"total benefit: {_fmt(reward.total)}  (per stage {_fmt(reward.per_stage_mean)})")
    _allocation_csv(config, allocation.durations, reward.rewards, reward.penalties)


def _run_dynamic(config: ScenarioConfig) -> None:
    _require(config, "tasks", "penalty", "arrival_rate")
    model = config.model()
    params = QueueParams(
        initial_queue=config.queue,
        arrival_rate=config.arrival_rate,
        penalty_rate=config.penalty,
        horizon=config.tasks,
    )
    result = solve_finite_horizon(model, params)
    best = result.best
    print(f"dynamic queue: horizon {config.tasks}, initial queue {_fmt(config.queue)}, "
          f"arrivals {_fmt(config.arrival_rate)}/s, penalty {_fmt(config.penalty)}/s")
    print(f"best pattern: {best.pattern()}  (objective {_fmt(best.objective)})")
    for i, t in enumerate(best.allocation.durations, start=1):
        print(f"  stage {i}: {_fmt(t)} s")
    n1, lam, c = config.queue, config.arrival_rate, config.penalty
    queue = best.expected_queue
    rewards = [value(model, t) for t in best.allocation.durations]
    penalties = [
        c * q * t + 0.5 * c * lam * t * t
        for q, t in zip(queue, best.allocation.durations)
    ]
    _allocation_csv(config, best.allocation.durations, rewards, penalties)


def _run_simulate(config: ScenarioConfig) -> None:
    _require(config, "penalty", "arrival_rate")
    model = config.model()
    sim = SimConfig(
        model=model,
        arrival_rate=config.arrival_rate,
        penalty_rate=config.penalty,
        stages=config.stages,
        horizon=config.horizon,
        evolution=config.evolution,  # type: ignore[arg-type]
        policy=config.policy,  # type: ignore[arg-type]
        seed=config.seed,
        initial_queue=config.queue,
    )
    trace = run_policy(sim)
    print(f"simulated {len(trace.records)} stage(s) under {config.policy} "
          f"({config.evolution} evolution, seed {config.seed})")
    print(f"mean benefit per stage: {_fmt(trace.mean_benefit)}")
    print(f"benefit per second:     {_fmt(trace.benefit_rate)}")
    rows = [
        [
            str(r.stage), _fmt(r.queue_before), _fmt(r.duration), _fmt(r.reward),
            _fmt(r.penalty), _fmt(r.arrivals), _fmt(r.idle_time),
            _fmt(r.queue_after), _fmt(r.benefit), _fmt(r.mean_benefit),
        ]
        for r in trace.records
    ]
    _write_csv(
        Path(config.output_dir) / "trace.csv",
        _header_lines(config, [
            "units: duration, idle_time s; queue lengths tasks; benefit dimensionless",
            f"idle convention: {trace.metadata['idle_convention']}",
        ]),
        ["stage", "queue_before", "duration", "reward", "penalty", "arrivals",
         "idle_time", "queue_after", "benefit", "mean_benefit"],
        rows,
    )


def _run_sweep(config: ScenarioConfig) -> None:
    _require(config, "penalty", "lambdas")
    model = config.model()
    points = benefit_sweep(
        model,
        config.penalty,
        list(config.lambdas),
        config.stages,
        config.seed,
        horizon=config.horizon,
        initial_queue=config.queue,
    )
    print(f"benefit sweep over {len(points)} arrival rate(s), {config.stages} stages each")
    print("lambda   receding-horizon   greedy")
    for p in points:
        print(f"{_fmt(p.arrival_rate):>8}  {_fmt(p.rh_benefit):>16}  {_fmt(p.greedy_benefit):>8}")
    rows = [[_fmt(p.arrival_rate), _fmt(p.rh_benefit), _fmt(p.greedy_benefit)] for p in points]
    _write_csv(
        Path(config.output_dir) / "sweep.csv",
        _header_lines(config, [
            "units: lambda tasks/s; benefits are benefit per second of operator time",
        ]),
        ["lambda", "benefit_rh", "benefit_greedy"],
        rows,
    )


def _run_arrival_rate(config: ScenarioConfig) -> None:
    _require(config, "penalty")
    model = config.model()
    tau, rate = optimal_arrival_rate(model, config.penalty)
    print(f"self-paced service time: {_fmt(tau)} s")
    print(f"optimal arrival rate:    {_fmt(rate)} tasks/s")


_RUNNERS = {
    "static-time": _run_static_time,
    "static-latency": _run_static_latency,
    "dynamic": _run_dynamic,
    "simulate": _run_simulate,
    "sweep": _run_sweep,
    "arrival-rate": _run_arrival_rate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opqueue",
        description="Optimal duration allocation for operator decision queues.",
        exit_on_error=False,
    )
    sub = parser.add_subparsers(dest="kind")
    for kind in _KINDS:
        p = sub.add_parser(kind, exit_on_error=False)
        p.add_argument("--config", help="flat key = value scenario file")
        p.add_argument("--pew", help="logistic model: p0,steepness,offset")
        p.add_argument("--ddm", help="drift-diffusion model: drift,diffusion,threshold")
        p.add_argument("--output-dir", dest="output_dir")
        keys = [k for k, (_, kinds) in _FIELDS.items()
                if k not in ("pew", "ddm", "output_dir") and (kinds is None or kind in kinds)]
        for key in keys:
            flag = "--" + key.replace("_", "-")
            parser_type = _FIELDS[key][0]
            if parser_type in (int, float):
                p.add_argument(flag, dest=key, type=parser_type)
            else:
                p.add_argument(flag, dest=key)
    return parser


def run(argv: list[str]) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and exc.code == 0:  # --help
            return 0
        print("error: invalid arguments", file=sys.stderr)
        return 1
    if ns.kind is None:
        print(f"error: expected a subcommand from {', '.join(_KINDS)}", file=sys.stderr)
        return 1
    flag_values = {k: v for k, v in vars(ns).items() if k not in ("kind", "config")}
    try:
        file_values = parse_config_file(ns.config) if ns.config else {}
        config = build_config(ns.kind, file_values, flag_values)
        if config.evolution not in ("expected", "sampled"):
            raise ConfigError(f"unknown evolution mode {config.evolution!r}")
        if config.policy not in ("receding_horizon", "greedy"):
            raise ConfigError(f"unknown policy {config.policy!r}")
        _RUNNERS[ns.kind](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, NoSolutionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, CapacityError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except OpqueueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
