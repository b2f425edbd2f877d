"""Experiment matrix: sizes x intersection regimes x seeds x algorithms, with CSV output."""

from __future__ import annotations

import csv
import functools
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .instances import GeneratorParams, generate_random, handcrafted_suite
from .model import ProblemInstance, Uav, validate_schedule
from .planners import ALGORITHMS, PlannerConfig, run_planner
from .transport import ResourceCapError

RESULT_FIELDS = ["n_targets", "n_uavs", "regime_low", "regime_high", "seed_index",
                 "instance_seed", "source", "algorithm", "status", "complete", "fuel",
                 "served", "demand", "clusters", "nodes"]
TIMING_FIELDS = ["n_targets", "n_uavs", "regime_low", "regime_high", "seed_index",
                 "algorithm", "elapsed"]
SUMMARY_FIELDS = ["n_targets", "n_uavs", "regime_low", "regime_high", "algorithm", "runs",
                  "mean_elapsed", "mean_fuel", "completion_ratio", "incomplete",
                  "cap_exceeded", "invalid"]

STATUSES = ("complete", "incomplete", "cap_exceeded", "invalid")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    sizes: list[tuple[int, int]]
    regimes: list[tuple[float, float]]
    seeds_per_cell: int = 100
    algorithms: list[str] = field(default_factory=lambda: ["SVA", "GA", "HGA", "IH"])
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    master_seed: int = 0
    window_width: int = 20
    largest_coordinate: int = 20
    demand_per_target: int = 1
    handcrafted_fraction: float = 0.0
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        self.sizes = [tuple(int(v) for v in s) for s in self.sizes]
        self.regimes = [tuple(float(v) for v in r) for r in self.regimes]
        self.algorithms = [a.upper() for a in self.algorithms]
        if not self.sizes:
            raise ConfigError("sizes must not be empty")
        if not self.regimes:
            raise ConfigError("regimes must not be empty")
        if not self.algorithms:
            raise ConfigError("algorithms must not be empty")
        unknown = sorted(set(self.algorithms) - set(ALGORITHMS))
        if unknown:
            raise ConfigError(f"unknown algorithms {unknown}; choose from {list(ALGORITHMS)}")
        if self.seeds_per_cell < 1:
            raise ConfigError("seeds_per_cell must be >= 1")
        if not 0 <= self.handcrafted_fraction <= 1:
            raise ConfigError("handcrafted_fraction must lie in [0, 1]")
        for n, m in self.sizes:
            if n < 1 or m < 1:
                raise ConfigError(f"bad size ({n}, {m})")
        for r in self.regimes:
            if len(r) != 2 or not 0 <= r[0] <= r[1] <= 1:
                raise ConfigError(f"bad regime {r}")


def config_from_dict(doc: dict) -> ExperimentConfig:
    doc = dict(doc)
    planner = doc.pop("planner", {})
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = sorted(set(doc) - known)
    if extra:
        raise ConfigError(f"unknown config keys {extra}")
    for key in ("sizes", "regimes"):
        if key not in doc:
            raise ConfigError(f"config is missing '{key}'")
    try:
        return ExperimentConfig(planner=PlannerConfig(**planner), **doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    return config_from_dict(doc)


@dataclass
class RunRecord:
    n_targets: int
    n_uavs: int
    regime_low: float
    regime_high: float
    seed_index: int
    instance_seed: int
    source: str
    algorithm: str
    status: str
    fuel: float | None
    served: int
    demand: int
    clusters: int
    nodes: int
    elapsed: float

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def key(self):
        return (self.n_targets, self.n_uavs, self.regime_low, self.regime_high,
                self.seed_index, self.algorithm)


@dataclass
class SummaryRow:
    n_targets: int
    n_uavs: int
    regime_low: float
    regime_high: float
    algorithm: str
    runs: int
    mean_elapsed: float
    mean_fuel: float | None
    completion_ratio: float
    failures: dict[str, int]


@dataclass
class ExperimentReport:
    runs: list[RunRecord]
    rows: list[SummaryRow]


def instance_seed(master_seed: int, size_index: int, regime_index: int, seed_index: int) -> int:
    ss = np.random.SeedSequence([master_seed, size_index, regime_index, seed_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _with_fleet(instance: ProblemInstance, n_uavs: int) -> ProblemInstance:
    cap = instance.uavs[0].fuel_capacity
    return ProblemInstance(instance.depot, instance.targets,
                           tuple(Uav(k, cap) for k in range(n_uavs)),
                           instance.largest_coordinate, instance.loiter_fuel,
                           instance.require_depot_return)


@functools.lru_cache(maxsize=1)
def _suite() -> tuple[ProblemInstance, ...]:
    return tuple(handcrafted_suite())


def _cell_instance(config: ExperimentConfig, size_index: int, regime_index: int,
                   seed_index: int):
    n, m = config.sizes[size_index]
    regime = config.regimes[regime_index]
    seed = instance_seed(config.master_seed, size_index, regime_index, seed_index)
    n_hand = int(round(config.handcrafted_fraction * config.seeds_per_cell))
    if seed_index < n_hand:
        suite = [inst for inst in _suite() if len(inst.targets) == n]
        if suite:
            return _with_fleet(suite[seed_index % len(suite)], m), seed, "handcrafted"
    params = GeneratorParams(n, m, config.window_width, regime, config.largest_coordinate,
                             config.demand_per_target)
    return generate_random(params, seed), seed, "random"


def _run_cell(args) -> list[RunRecord]:
    config, si, ri, k = args
    instance, seed, source = _cell_instance(config, si, ri, k)
    n, m = config.sizes[si]
    low, high = config.regimes[ri]
    records = []
    for algorithm in config.algorithms:
        t0 = time.perf_counter()
        try:
            result = run_planner(algorithm, instance, config.planner)
        except ResourceCapError:
            records.append(RunRecord(n, m, low, high, k, seed, source, algorithm, "cap_exceeded",
                                     None, 0, instance.total_demand, 0, 0,
                                     time.perf_counter() - t0))
            continue
        elapsed = time.perf_counter() - t0
        sched = result.schedule
        report = validate_schedule(instance, sched)
        if not report.ok:
            status = "invalid"
        else:
            status = "complete" if sched.complete else "incomplete"
        records.append(RunRecord(n, m, low, high, k, seed, source, algorithm, status,
                                 sched.total_fuel, sched.served, instance.total_demand,
                                 result.clusters_solved, result.nodes_explored, elapsed))
    return records


def _mean(values):
    return float(np.mean(values)) if values else None


def summarize(runs: list[RunRecord], key) -> list[dict]:
    """Group runs by ``key(run)`` and aggregate elapsed, fuel (complete only) and completion."""
    groups: dict[tuple, list[RunRecord]] = {}
    for r in runs:
        groups.setdefault(key(r), []).append(r)
    out = []
    for k in sorted(groups):
        rs = groups[k]
        complete = [r for r in rs if r.complete]
        out.append({
            "key": k,
            "runs": len(rs),
            "mean_elapsed": _mean([r.elapsed for r in rs]),
            "mean_fuel": _mean([r.fuel for r in complete]),
            "completed": len(complete),
            "completion_ratio": len(complete) / len(rs),
            "failures": {s: sum(r.status == s for r in rs) for s in STATUSES[1:]},
        })
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    cells = [(config, si, ri, k) for si in range(len(config.sizes))
             for ri in range(len(config.regimes)) for k in range(config.seeds_per_cell)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(_run_cell, cells, chunksize=4))
    else:
        chunks = [_run_cell(c) for c in cells]
    order = {a: i for i, a in enumerate(config.algorithms)}
    runs = sorted((r for chunk in chunks for r in chunk),
                  key=lambda r: (r.key()[:5], order[r.algorithm]))
    rows = []
    for g in summarize(runs, lambda r: (r.n_targets, r.n_uavs, r.regime_low, r.regime_high,
                                        order[r.algorithm])):
        n, m, low, high, a = g["key"]
        rows.append(SummaryRow(n, m, low, high, config.algorithms[a], g["runs"],
                               g["mean_elapsed"], g["mean_fuel"], g["completion_ratio"],
                               g["failures"]))
    return ExperimentReport(runs, rows)


# -- CSV output ------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def results_csv(report: ExperimentReport) -> str:
    """One row per (cell, algorithm); wall time is kept out so the file is reproducible."""
    return _csv(RESULT_FIELDS, ([r.n_targets, r.n_uavs, r.regime_low, r.regime_high, r.seed_index,
                                 r.instance_seed, r.source, r.algorithm, r.status, r.complete,
                                 r.fuel, r.served, r.demand, r.clusters, r.nodes]
                                for r in report.runs))


def timings_csv(report: ExperimentReport) -> str:
    # full precision so aggregates can be recomputed exactly from this file
    return _csv(TIMING_FIELDS, ([r.n_targets, r.n_uavs, r.regime_low, r.regime_high,
                                 r.seed_index, r.algorithm, repr(r.elapsed)] for r in report.runs))


def summary_csv(report: ExperimentReport) -> str:
    return _csv(SUMMARY_FIELDS, ([s.n_targets, s.n_uavs, s.regime_low, s.regime_high, s.algorithm,
                                  s.runs, s.mean_elapsed, s.mean_fuel, s.completion_ratio,
                                  s.failures["incomplete"], s.failures["cap_exceeded"],
                                  s.failures["invalid"]] for s in report.rows))


def figure_csvs(runs: list[RunRecord], algorithms: list[str]) -> dict[str, str]:
    """Plot-ready aggregates, by problem size and by intersection regime."""
    order = {a: i for i, a in enumerate(algorithms)}
    files = {}
    for axis, key, cols in (
            ("size", lambda r: (r.n_targets, r.n_uavs, order[r.algorithm]), ["n_targets", "n_uavs"]),
            ("regime", lambda r: (r.regime_low, r.regime_high, order[r.algorithm]),
             ["regime_low", "regime_high"])):
        groups = summarize(runs, key)

        def head(g):
            return list(g["key"][:-1]) + [algorithms[g["key"][-1]]]

        files[f"runtime_by_{axis}.csv"] = _csv(cols + ["algorithm", "runs", "mean_elapsed"],
                                               (head(g) + [g["runs"], g["mean_elapsed"]] for g in groups))
        files[f"fuel_by_{axis}.csv"] = _csv(cols + ["algorithm", "complete_runs", "mean_fuel"],
                                            (head(g) + [g["completed"], g["mean_fuel"]] for g in groups))
        files[f"completion_by_{axis}.csv"] = _csv(
            cols + ["algorithm", "runs", "completed", "completion_ratio"],
            (head(g) + [g["runs"], g["completed"], g["completion_ratio"]] for g in groups))
    return files


def read_runs(results_text: str, timings_text: str | None = None) -> list[RunRecord]:
    """Rebuild run records from ``results.csv`` (and optionally ``timings.csv``)."""
    elapsed = {}
    if timings_text:
        for row in csv.DictReader(io.StringIO(timings_text)):
            k = (int(row["n_targets"]), int(row["n_uavs"]), float(row["regime_low"]),
                 float(row["regime_high"]), int(row["seed_index"]), row["algorithm"])
            elapsed[k] = float(row["elapsed"])
    runs = []
    for row in csv.DictReader(io.StringIO(results_text)):
        r = RunRecord(int(row["n_targets"]), int(row["n_uavs"]), float(row["regime_low"]),
                      float(row["regime_high"]), int(row["seed_index"]), int(row["instance_seed"]),
                      row["source"], row["algorithm"], row["status"],
                      float(row["fuel"]) if row["fuel"] else None, int(row["served"]),
                      int(row["demand"]), int(row["clusters"]), int(row["nodes"]), 0.0)
        r.elapsed = elapsed.get(r.key(), 0.0)
        runs.append(r)
    return runs


def write_outputs(report: ExperimentReport, config: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "results.csv": results_csv(report),
        "timings.csv": timings_csv(report),
        "summary.csv": summary_csv(report),
        **figure_csvs(report.runs, config.algorithms),
    }
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        written.append(path)
    return written


def config_to_dict(config: ExperimentConfig) -> dict:
    doc = asdict(config)
    doc["sizes"] = [list(s) for s in config.sizes]
    doc["regimes"] = [list(r) for r in config.regimes]
    return doc

