"""Experiment orchestration: presets, multi-seed suites, aggregation, CSV.

A spec bundles one run configuration with an algorithm choice, a seed list,
and a checkpoint grid; running it yields per-seed traces, a summary row
(max / median / population-std of final values plus tree-shape medians),
and a median-and-envelope curve sampled at the checkpoints.  All outputs
are deterministic functions of the spec.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .benchmarks import benchmark_names, get_benchmark
from .engine import (
    RoundRecord,
    RunConfig,
    RunTrace,
    run_pcts,
    run_random_search,
    run_wait_and_act,
)
from .mfpoo import run_mfpoo
from .policies import PolicyKind, PolicyParams
from .simulator import CostModel, DelayModel, FidelityModel

ALGORITHMS = ("pcts", "mfpoo", "wait_and_act", "random")

OUT_DIR_ENV_VAR = "PCTS_OUT_DIR"


class ConfigError(Exception):
    """Configuration problem with a stable diagnostic category."""

    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


# ---------------------------------------------------------------------------
# presets: the reproduction configurations for the synthetic suite

# nu1 is picked to span the benchmark's value range at the root (so basin-level
# optimism is never starved) and rho/b are calibrated for ~300-round budgets
PRESETS: dict[str, dict] = {
    "hartmann3-paper": {
        "benchmark": "hartmann3", "policy": "ucbv", "sigma2": 0.01,
        "delay": "const:4", "fidelity": "on", "zeta0": 0.1,
        "nu1": 2.0, "rho": 0.7, "b": 0.5, "budget_rounds": 300,
    },
    "hartmann6-paper": {
        "benchmark": "hartmann6", "policy": "ucb1-sigma", "sigma2": 0.05,
        "delay": "const:4", "fidelity": "on", "zeta0": 0.1,
        "nu1": 2.0, "rho": 0.8, "budget_rounds": 300,
    },
    "currin-paper": {
        "benchmark": "currin", "policy": "ucb1-sigma", "sigma2": 0.05,
        "delay": "const:4", "fidelity": "on", "zeta0": 0.1,
        "nu1": 10.0, "rho": 0.8, "budget_rounds": 300,
    },
    "borehole-paper": {
        "benchmark": "borehole", "policy": "ucbv", "sigma2": 0.01,
        "delay": "const:4", "fidelity": "on", "zeta0": 0.1,
        "nu1": 150.0, "rho": 0.8, "b": 350.0, "budget_rounds": 300,
    },
    "branin-paper": {
        "benchmark": "branin", "policy": "ucbv", "sigma2": 0.05,
        "delay": "const:4", "fidelity": "on", "zeta0": 0.1,
        "nu1": 50.0, "rho": 0.8, "b": 5.0, "budget_rounds": 300,
    },
    "branin-geo": {
        "benchmark": "branin", "policy": "ucbv", "sigma2": 0.05,
        "delay": "geo:10", "fidelity": "on", "zeta0": 0.1,
        "nu1": 50.0, "rho": 0.8, "b": 5.0, "budget_rounds": 190,
    },
    "schwefel-paper": {
        "benchmark": "schwefel", "policy": "ucb1-sigma", "sigma2": 0.1,
        "delay": "const:4", "fidelity": "off",
        "nu1": 1000.0, "rho": 0.95, "budget_rounds": 300,
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One run template fanned out over seeds."""

    run: RunConfig
    algorithm: str = "pcts"
    seeds: tuple[int, ...] = (0,)
    checkpoints: tuple[float, ...] = ()
    out_dir: Optional[str] = None
    nu_max: float = 1.0
    rho_max: float = 0.95
    jobs: int = 1

    def validate(self) -> "ExperimentSpec":
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("bad-algo", f"unknown algorithm {self.algorithm!r}")
        if not self.seeds:
            raise ConfigError("empty-seeds", "need at least one seed")
        for a, b in zip(self.checkpoints, self.checkpoints[1:]):
            if not b > a:
                raise ConfigError("bad-checkpoints", "checkpoints must be strictly increasing")
        try:
            self.run.validate()
        except ValueError as exc:
            raise ConfigError("bad-run-config", str(exc)) from exc
        return self


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    benchmark: str
    delay: str
    seeds: int
    max_final_value: float
    median_final_value: float
    std_final_value: float
    median_tree_height: float
    median_node_count: float


@dataclass(frozen=True)
class CurvePoint:
    checkpoint: float
    regret_min: float
    regret_median: float
    regret_max: float
    value_min: float
    value_median: float
    value_max: float


@dataclass
class SuiteResult:
    traces: list[RunTrace]
    summary: SummaryRow
    curve: list[CurvePoint]


# ---------------------------------------------------------------------------
# configuration parsing


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Accepts '0,1,2', the inclusive range form '0-9', or a single integer."""
    parts = [p for chunk in str(text).split(",") for p in chunk.split()]
    seeds: list[int] = []
    for part in parts:
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return tuple(seeds)


def _parse_checkpoints(text: str) -> tuple[float, ...]:
    parts = [p for chunk in str(text).split(",") for p in chunk.split()]
    return tuple(float(p) for p in parts)


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise ConfigError("bad-value", f"cannot interpret {value!r} as on/off")


def _read_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("io", f"{path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("bad-value", f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("bad-value", f"{path}: JSON config must be an object")
        flat = {}
        for key, value in data.items():
            if isinstance(value, dict):  # sectioned form
                flat.update(value)
            else:
                flat[key] = value
        return flat
    parser = configparser.ConfigParser()
    try:
        if stripped.startswith("["):
            parser.read_string(text, source=path)
        else:  # section-less key = value files
            parser.read_string("[experiment]\n" + text, source=path)
    except configparser.Error as exc:
        raise ConfigError("bad-value", f"{path}: {exc}") from exc
    flat = {}
    for section in parser.sections():
        flat.update(dict(parser[section]))
    return flat


_KNOWN_KEYS = {
    "preset", "benchmark", "algo", "policy", "sigma2", "b", "c", "nu1", "rho",
    "nu_max", "rho_max", "delay", "fidelity", "zeta0", "budget_cost",
    "budget_rounds", "seeds", "checkpoints", "out", "jobs", "noise",
    "cost_model", "cost_beta",
}


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if value is not None:
            out[key] = value
    return out


def parse_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentSpec:
    """Resolve a spec from an optional config file plus flag overrides.

    Precedence: preset defaults < config file < explicit overrides.  Defaults
    not otherwise given (noise level, range proxy) come from the benchmark
    registry.
    """
    raw: dict = {}
    if path is not None:
        raw = _merge(raw, _read_config_file(path))
    if overrides:
        raw = _merge(raw, overrides)

    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError("bad-value", f"unknown config keys: {sorted(unknown)}")

    preset_name = raw.get("preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError("bad-value", f"unknown preset {preset_name!r}; known: {sorted(PRESETS)}")
        merged = _merge(PRESETS[preset_name], raw)
    else:
        merged = raw

    benchmark = merged.get("benchmark")
    if benchmark is None:
        raise ConfigError("unknown-benchmark", "no benchmark given (flag, file, or preset)")
    if benchmark not in benchmark_names():
        raise ConfigError(
            "unknown-benchmark", f"unknown benchmark {benchmark!r}; known: {benchmark_names()}"
        )
    bench = get_benchmark(benchmark)

    try:
        policy_name = str(merged.get("policy", "ucbv")).lower()
        try:
            kind = PolicyKind(policy_name)
        except ValueError:
            raise ConfigError("bad-value", f"unknown policy {policy_name!r}") from None
        sigma2_raw = merged.get("sigma2", bench.default_sigma2)
        if sigma2_raw is None:
            if kind == PolicyKind.UCB1_SIGMA:
                raise ConfigError("missing-sigma", "ucb1-sigma requires sigma2")
            sigma2 = None
        else:
            sigma2 = float(sigma2_raw)
        b = merged.get("b", bench.default_b)
        if kind == PolicyKind.UCBV and b is None:
            raise ConfigError("missing-b", "ucbv requires a range proxy b")
        policy = PolicyParams(
            kind=kind,
            sigma=math.sqrt(sigma2) if kind == PolicyKind.UCB1_SIGMA else None,
            b=float(b) if kind == PolicyKind.UCBV else None,
            c=float(merged.get("c", 1.0)),
        )

        rho = float(merged.get("rho", 0.95))
        if not 0.0 < rho < 1.0:
            raise ConfigError("bad-rho", f"rho must lie strictly inside (0, 1), got {rho}")
        rho_max = float(merged.get("rho_max", 0.95))
        if not 0.0 < rho_max < 1.0:
            raise ConfigError("bad-rho", f"rho_max must lie strictly inside (0, 1), got {rho_max}")

        delay = merged.get("delay", "none")
        if isinstance(delay, str):
            delay = DelayModel.parse(delay)
        fidelity = FidelityModel(
            zeta0=float(merged.get("zeta0", 0.1)),
            enabled=_as_bool(merged.get("fidelity", "off")),
        )
        cost_model = CostModel(
            kind=str(merged.get("cost_model", "benchmark")),
            beta=float(merged.get("cost_beta", 1.0)),
        )

        budget_cost = merged.get("budget_cost")
        budget_rounds = merged.get("budget_rounds")
        if budget_cost is None and budget_rounds is None:
            raise ConfigError("bad-budget", "set exactly one of budget_cost / budget_rounds")
        if budget_cost is not None and budget_rounds is not None:
            raise ConfigError("bad-budget", "budget_cost and budget_rounds are mutually exclusive")

        run = RunConfig(
            benchmark=benchmark,
            policy=policy,
            nu1=float(merged.get("nu1", 1.0)),
            rho=rho,
            delay=delay,
            noise_sigma2=sigma2,
            fidelity=fidelity,
            cost_model=cost_model,
            budget_cost=float(budget_cost) if budget_cost is not None else None,
            budget_rounds=int(budget_rounds) if budget_rounds is not None else None,
            seed=0,
            noise_kind=str(merged.get("noise", "gaussian")),
        )

        seeds = merged.get("seeds", (0,))
        if isinstance(seeds, str):
            seeds = _parse_seeds(seeds)
        else:
            seeds = tuple(int(s) for s in seeds)
        if not seeds:
            raise ConfigError("empty-seeds", "need at least one seed")

        checkpoints = merged.get("checkpoints", ())
        if isinstance(checkpoints, str):
            checkpoints = _parse_checkpoints(checkpoints)
        else:
            checkpoints = tuple(float(c) for c in checkpoints)

        out_dir = merged.get("out")
        env_out = os.environ.get(OUT_DIR_ENV_VAR)
        if env_out:
            out_dir = env_out

        spec = ExperimentSpec(
            run=run,
            algorithm=str(merged.get("algo", "pcts")),
            seeds=seeds,
            checkpoints=checkpoints,
            out_dir=out_dir,
            nu_max=float(merged.get("nu_max", 1.0)),
            rho_max=rho_max,
            jobs=int(merged.get("jobs", 1)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("bad-value", str(exc)) from exc
    return spec.validate()


# ---------------------------------------------------------------------------
# execution and aggregation


def _run_one(spec: ExperimentSpec, seed: int) -> RunTrace:
    cfg = replace(spec.run, seed=seed)
    if spec.algorithm == "pcts":
        return run_pcts(cfg)
    if spec.algorithm == "wait_and_act":
        return run_wait_and_act(cfg)
    if spec.algorithm == "random":
        return run_random_search(cfg)
    best, _ = run_mfpoo(cfg, spec.nu_max, spec.rho_max)
    return best


def _sample_at(records: list[RoundRecord], checkpoint: float, by_cost: bool) -> Optional[RoundRecord]:
    """Last record at or before the checkpoint (step function, no interpolation)."""
    chosen = None
    for record in records:
        coordinate = record.cumulative_cost if by_cost else record.t
        if coordinate <= checkpoint:
            chosen = record
        else:
            break
    return chosen


def summarize(spec: ExperimentSpec, traces: list[RunTrace]) -> SummaryRow:
    finals = np.array([trace.final_value for trace in traces], dtype=float)
    heights = np.array([trace.tree_height for trace in traces], dtype=float)
    nodes = np.array([trace.node_count for trace in traces], dtype=float)
    return SummaryRow(
        algorithm=spec.algorithm,
        benchmark=spec.run.benchmark,
        delay=spec.run.delay.describe(),
        seeds=len(traces),
        max_final_value=float(np.nanmax(finals)) if finals.size else math.nan,
        median_final_value=float(np.nanmedian(finals)) if finals.size else math.nan,
        std_final_value=float(np.nanstd(finals)) if finals.size else math.nan,
        median_tree_height=float(np.median(heights)) if heights.size else math.nan,
        median_node_count=float(np.median(nodes)) if nodes.size else math.nan,
    )


def build_curve(spec: ExperimentSpec, traces: list[RunTrace]) -> list[CurvePoint]:
    by_cost = spec.run.budget_rounds is None
    curve = []
    for checkpoint in spec.checkpoints:
        regrets, values = [], []
        for trace in traces:
            record = _sample_at(trace.records, checkpoint, by_cost)
            regrets.append(record.simple_regret if record is not None else math.nan)
            values.append(record.best_value if record is not None else math.nan)
        regrets_arr = np.array(regrets, dtype=float)
        values_arr = np.array(values, dtype=float)
        curve.append(
            CurvePoint(
                checkpoint=checkpoint,
                regret_min=float(np.nanmin(regrets_arr)),
                regret_median=float(np.nanmedian(regrets_arr)),
                regret_max=float(np.nanmax(regrets_arr)),
                value_min=float(np.nanmin(values_arr)),
                value_median=float(np.nanmedian(values_arr)),
                value_max=float(np.nanmax(values_arr)),
            )
        )
    return curve


def run_suite(spec: ExperimentSpec) -> SuiteResult:
    """Run every seed, aggregate finals, and sample the checkpoint curve.

    Seeds run independently (optionally in parallel); outputs are ordered by
    seed no matter the completion order.
    """
    spec.validate()
    seeds = sorted(spec.seeds)
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            traces = list(pool.map(_run_one, [spec] * len(seeds), seeds))
    else:
        traces = [_run_one(spec, seed) for seed in seeds]
    return SuiteResult(traces=traces, summary=summarize(spec, traces), curve=build_curve(spec, traces))


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain text otherwise."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


TRACE_COLUMNS = (
    "round", "cumulative_cost", "depth_selected", "fidelity",
    "feedbacks_received", "best_value", "simple_regret", "tree_height", "node_count",
)

SUMMARY_COLUMNS = (
    "algorithm", "benchmark", "delay", "seeds", "max_final_value",
    "median_final_value", "std_final_value", "median_tree_height", "median_node_count",
)

CURVE_COLUMNS = (
    "checkpoint", "regret_min", "regret_median", "regret_max",
    "value_min", "value_median", "value_max",
)


def emit_trace_csv(trace: RunTrace, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for r in trace.records:
                writer.writerow(
                    [
                        r.t,
                        _fmt(r.cumulative_cost),
                        r.depth,
                        _fmt(r.z),
                        r.feedbacks_received,
                        _fmt(r.best_value),
                        _fmt(r.simple_regret),
                        r.tree_height,
                        r.node_count,
                    ]
                )
    except OSError as exc:
        raise ConfigError("io", f"{path}: {exc}") from exc


def emit_summary_csv(rows: list[SummaryRow], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for row in rows:
                writer.writerow(
                    [
                        row.algorithm,
                        row.benchmark,
                        row.delay,
                        row.seeds,
                        _fmt(row.max_final_value),
                        _fmt(row.median_final_value),
                        _fmt(row.std_final_value),
                        _fmt(row.median_tree_height),
                        _fmt(row.median_node_count),
                    ]
                )
    except OSError as exc:
        raise ConfigError("io", f"{path}: {exc}") from exc


def emit_curve_csv(curve: list[CurvePoint], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CURVE_COLUMNS)
            for p in curve:
                writer.writerow(
                    [
                        _fmt(p.checkpoint),
                        _fmt(p.regret_min),
                        _fmt(p.regret_median),
                        _fmt(p.regret_max),
                        _fmt(p.value_min),
                        _fmt(p.value_median),
                        _fmt(p.value_max),
                    ]
                )
    except OSError as exc:
        raise ConfigError("io", f"{path}: {exc}") from exc


def emit_outputs(spec: ExperimentSpec, result: SuiteResult) -> list[str]:
    """Write per-seed traces, the summary, and the curve; returns the paths."""
    if spec.out_dir is None:
        return []
    os.makedirs(spec.out_dir, exist_ok=True)
    paths = []
    for trace in result.traces:
        path = os.path.join(spec.out_dir, f"trace_seed{trace.seed}.csv")
        emit_trace_csv(trace, path)
        paths.append(path)
    summary_path = os.path.join(spec.out_dir, "summary.csv")
    emit_summary_csv([result.summary], summary_path)
    paths.append(summary_path)
    if result.curve:
        curve_path = os.path.join(spec.out_dir, "curve.csv")
        emit_curve_csv(result.curve, curve_path)
        paths.append(curve_path)
    return paths
