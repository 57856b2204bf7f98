"""Experiment orchestration: run every (algorithm, instance) pair a fixed
number of times with derived seeds, aggregate into results-table rows and a
pairwise significance matrix, and render text and CSV reports.

Plan files are TOML. Minimal example::

    runs_per_pair = 3
    base_seed = 7
    algorithms = ["gbest", "gbest-gc", "lbest", "lbest-gc",
                  "grid", "grid-gc", "hierarchy", "hierarchy-gc"]

    [[instances]]
    vars = 16
    clauses = 100
    len = 3
    wmin = 1
    wmax = 100
    seed = 1
    with_opt = true

    [[instances]]
    path = "data/example.wcnf"

    [swarm]            # optional SwarmConfig overrides (seed is derived)
    stagnation_window = 1500

    [topology]         # optional topology parameters
    adapt_interval = 200

Relative instance paths resolve against the plan file's directory. The seed
for run r of algorithm a on instance d is blake2b(base_seed, a, d, r), so any
single run can be reproduced in isolation.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bpso import RunResult, SwarmConfig, run
from .stats import (
    ALPHA,
    AlgorithmRuns,
    AnovaResult,
    FCriticalLookupError,
    pairwise_anova,
)
from .topology import TopologyKind, TopologyOptions
from .wcnf import WcnfInstance, brute_force_optimum, generate_random, load_wcnf


class PlanError(ValueError):
    """Invalid experiment plan file or plan contents."""


@dataclass(frozen=True)
class AlgorithmSpec:
    label: str
    kind: TopologyKind
    gc: bool

    @classmethod
    def parse(cls, name: str) -> "AlgorithmSpec":
        base = name.strip().lower()
        gc = base.endswith("-gc")
        if gc:
            base = base[: -len("-gc")]
        pretty = {
            "gbest": "GBest",
            "lbest": "LBest",
            "grid": "Grid",
            "hierarchy": "Hierarchy",
        }
        if base not in pretty:
            raise PlanError(
                f"unknown algorithm {name!r}; valid names: "
                + ", ".join(sorted(pretty)) + " with optional -gc suffix"
            )
        label = pretty[base] + ("-GC" if gc else "")
        return cls(label, TopologyKind(base), gc)


DEFAULT_ALGORITHM_NAMES = (
    "gbest", "gbest-gc", "lbest", "lbest-gc",
    "grid", "grid-gc", "hierarchy", "hierarchy-gc",
)


def default_algorithms() -> list[AlgorithmSpec]:
    return [AlgorithmSpec.parse(name) for name in DEFAULT_ALGORITHM_NAMES]


@dataclass(frozen=True)
class GeneratorSpec:
    num_vars: int
    num_clauses: int
    clause_len: int
    weight_lo: int
    weight_hi: int
    seed: int
    with_opt: bool = False

    def build(self) -> WcnfInstance:
        instance = generate_random(
            self.num_vars, self.num_clauses, self.clause_len,
            self.weight_lo, self.weight_hi, self.seed,
        )
        if self.with_opt:
            optimum, _ = brute_force_optimum(instance)
            instance = dataclasses.replace(instance, known_optimum=optimum)
        return instance


@dataclass(frozen=True)
class InstanceSpec:
    label: str
    path: str | None = None
    generator: GeneratorSpec | None = None

    def load(self) -> WcnfInstance:
        if self.path is not None:
            return load_wcnf(self.path)
        return self.generator.build()


@dataclass
class ExperimentPlan:
    instances: list[InstanceSpec]
    algorithms: list[AlgorithmSpec] = field(default_factory=default_algorithms)
    runs_per_pair: int = 3
    base_seed: int = 0
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    topology_options: TopologyOptions = field(default_factory=TopologyOptions)
    workers: int = 1

    def __post_init__(self):
        if self.runs_per_pair < 1:
            raise PlanError(f"runs_per_pair must be >= 1, got {self.runs_per_pair}")
        if not self.algorithms:
            raise PlanError("algorithm list is empty")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise PlanError(f"duplicate algorithms in plan: {labels}")
        if not self.instances:
            raise PlanError("instance list is empty")


def derive_seed(base_seed: int, algorithm_index: int, instance_index: int,
                run_index: int) -> int:
    """Stable 64-bit seed for one run: blake2b over the packed quadruple."""
    payload = struct.pack(
        "<QQQQ",
        base_seed & 0xFFFFFFFFFFFFFFFF,
        algorithm_index,
        instance_index,
        run_index,
    )
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    dataset: str
    run_index: int
    seed: int
    best_fitness: int
    iterations_run: int
    converged: bool
    fitness_trace: tuple[tuple[int, int], ...]


@dataclass
class ExperimentReport:
    rows: list[AlgorithmRuns]
    records: list[RunRecord]
    anova: list[tuple[tuple[str, str], AnovaResult]]
    exclusions: list[tuple[str, str]]
    metadata: dict


def _load_plan_table(data: dict, plan_dir: Path) -> ExperimentPlan:
    known_keys = {
        "instances", "algorithms", "runs_per_pair", "base_seed",
        "swarm", "topology", "workers",
    }
    unknown = set(data) - known_keys
    if unknown:
        raise PlanError(f"unknown plan keys: {sorted(unknown)}")

    algorithms = [
        AlgorithmSpec.parse(name)
        for name in data.get("algorithms", DEFAULT_ALGORITHM_NAMES)
    ]

    instances = []
    for index, entry in enumerate(data.get("instances", [])):
        if not isinstance(entry, dict):
            raise PlanError(f"instance entry {index} is not a table")
        if "path" in entry:
            path = Path(entry["path"])
            if not path.is_absolute():
                path = plan_dir / path
            label = entry.get("label", path.stem)
            instances.append(InstanceSpec(label=label, path=str(path)))
        else:
            try:
                gen = GeneratorSpec(
                    num_vars=entry["vars"],
                    num_clauses=entry["clauses"],
                    clause_len=entry["len"],
                    weight_lo=entry.get("wmin", 1),
                    weight_hi=entry.get("wmax", 100),
                    seed=entry["seed"],
                    with_opt=entry.get("with_opt", False),
                )
            except KeyError as exc:
                raise PlanError(
                    f"instance entry {index} needs 'path' or generator keys "
                    f"(missing {exc})"
                ) from None
            label = entry.get(
                "label", f"gen-v{gen.num_vars}-c{gen.num_clauses}-s{gen.seed}"
            )
            instances.append(InstanceSpec(label=label, generator=gen))

    swarm_overrides = data.get("swarm", {})
    if "seed" in swarm_overrides:
        raise PlanError("swarm.seed is derived per run; set base_seed instead")
    try:
        swarm = SwarmConfig(**swarm_overrides)
    except TypeError as exc:
        raise PlanError(f"bad swarm override: {exc}") from None

    topo_overrides = data.get("topology", {})
    try:
        topology_options = TopologyOptions(**topo_overrides)
    except TypeError as exc:
        raise PlanError(f"bad topology option: {exc}") from None

    return ExperimentPlan(
        instances=instances,
        algorithms=algorithms,
        runs_per_pair=data.get("runs_per_pair", 3),
        base_seed=data.get("base_seed", 0),
        swarm=swarm,
        topology_options=topology_options,
        workers=data.get("workers", 1),
    )


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise PlanError(f"cannot parse plan {path}: {exc}") from None
    return _load_plan_table(data, path.parent)


def _execute_run(args) -> RunResult:
    instance, kind_value, config, topo_options = args
    return run(instance, TopologyKind(kind_value), config,
               topology_options=topo_options)


def run_experiment(plan: ExperimentPlan,
                   progress: Callable[[RunRecord], None] | None = None) -> ExperimentReport:
    """Execute the full plan and aggregate. Results are keyed by plan index
    order, never completion order, so reports are deterministic."""
    started = datetime.now(timezone.utc)

    loaded: list[tuple[int, str, WcnfInstance]] = []
    exclusions: list[tuple[str, str]] = []
    for d_idx, spec in enumerate(plan.instances):
        try:
            loaded.append((d_idx, spec.label, spec.load()))
        except Exception as exc:
            exclusions.append((spec.label, str(exc)))

    tasks = []
    keys = []
    for a_idx, algo in enumerate(plan.algorithms):
        for d_idx, label, instance in loaded:
            for r_idx in range(plan.runs_per_pair):
                seed = derive_seed(plan.base_seed, a_idx, d_idx, r_idx)
                config = dataclasses.replace(
                    plan.swarm, gc_enabled=algo.gc, seed=seed
                )
                tasks.append((instance, algo.kind.value, config,
                              plan.topology_options))
                keys.append((algo.label, label, r_idx, seed))

    if plan.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(_execute_run, tasks, chunksize=1))
    else:
        results = []
        for task, key in zip(tasks, keys):
            result = _execute_run(task)
            results.append(result)
            if progress is not None:
                progress(_to_record(key, result))

    records = [_to_record(key, result) for key, result in zip(keys, results)]
    if progress is not None and plan.workers > 1:
        for record in records:
            progress(record)

    rows = []
    for algo in plan.algorithms:
        for d_idx, label, instance in loaded:
            values = [
                rec.best_fitness
                for rec in records
                if rec.algorithm == algo.label and rec.dataset == label
            ]
            rows.append(
                AlgorithmRuns.from_runs(algo.label, label, values,
                                        instance.known_optimum)
            )

    anova: list[tuple[tuple[str, str], AnovaResult]] = []
    anova_note = None
    pooled = {
        algo.label: [
            rec.best_fitness for rec in records if rec.algorithm == algo.label
        ]
        for algo in plan.algorithms
    }
    n_pooled = len(loaded) * plan.runs_per_pair
    if len(plan.algorithms) < 2:
        anova_note = "fewer than two algorithms, no pairs to compare"
    elif n_pooled < 2:
        anova_note = "fewer than two runs per algorithm, ANOVA skipped"
    else:
        try:
            anova = pairwise_anova(pooled)
        except FCriticalLookupError as exc:
            anova_note = f"ANOVA skipped: {exc}"

    finished = datetime.now(timezone.utc)
    metadata = {
        "algorithms": [a.label for a in plan.algorithms],
        "instances": [spec.label for spec in plan.instances],
        "runs_per_pair": plan.runs_per_pair,
        "base_seed": plan.base_seed,
        "alpha": ALPHA,
        "anova_note": anova_note,
        "started": started.isoformat(),
        "finished": finished.isoformat(),
    }
    return ExperimentReport(rows, records, anova, exclusions, metadata)


def _to_record(key, result: RunResult) -> RunRecord:
    algo_label, dataset, r_idx, seed = key
    return RunRecord(
        algorithm=algo_label,
        dataset=dataset,
        run_index=r_idx,
        seed=seed,
        best_fitness=result.best_fitness,
        iterations_run=result.iterations_run,
        converged=result.converged,
        fitness_trace=tuple(result.fitness_trace),
    )


def _fmt_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def render_table_text(report: ExperimentReport) -> str:
    """Per-algorithm tables in the results-table column order, followed by
    the pairwise significance matrix."""
    runs_per_pair = report.metadata["runs_per_pair"]
    out = io.StringIO()
    print(f"experiment: base_seed={report.metadata['base_seed']}", file=out)
    print(f"generated: {report.metadata['finished']}", file=out)
    if report.exclusions:
        print("excluded instances:", file=out)
        for label, reason in report.exclusions:
            print(f"  {label}: {reason}", file=out)
    header = (["Dataset"] + [f"Run {i + 1}" for i in range(runs_per_pair)]
              + ["Average", "Optimum", "%"])
    widths = [12] + [11] * runs_per_pair + [13, 11, 8]
    for algo in report.metadata["algorithms"]:
        print(f"\n== {algo} ==", file=out)
        print("".join(h.rjust(w) for h, w in zip(header, widths)), file=out)
        for row in report.rows:
            if row.algorithm != algo:
                continue
            cells = ([row.dataset] + [str(v) for v in row.run_values]
                     + [_fmt_cell(row.average), _fmt_cell(row.optimum),
                        _fmt_cell(row.percent)])
            print("".join(c.rjust(w) for c, w in zip(cells, widths)), file=out)
    print(f"\n== Significance (pairwise one-way ANOVA, alpha={ALPHA}) ==", file=out)
    if not report.anova:
        note = report.metadata.get("anova_note") or "no pairs"
        print(f"significance matrix omitted: {note}", file=out)
    else:
        for (a, b), res in report.anova:
            verdict = "significant" if res.significant else "not-significant"
            print(
                f"{a} vs {b}: F={res.f_statistic:.4f} v1={res.v1} v2={res.v2} "
                f"Fcrit={res.f_critical:.2f} {verdict}",
                file=out,
            )
    return out.getvalue()


def render_runs_csv(report: ExperimentReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        ["algorithm", "dataset", "run", "seed", "best_fitness",
         "iterations", "converged"]
    )
    for rec in report.records:
        writer.writerow(
            [rec.algorithm, rec.dataset, rec.run_index, rec.seed,
             rec.best_fitness, rec.iterations_run,
             str(rec.converged).lower()]
        )
    return out.getvalue()


def render_summary_csv(report: ExperimentReport) -> str:
    runs_per_pair = report.metadata["runs_per_pair"]
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        ["algorithm", "dataset"]
        + [f"run_{i + 1}" for i in range(runs_per_pair)]
        + ["average", "optimum", "percent"]
    )
    for row in report.rows:
        writer.writerow(
            [row.algorithm, row.dataset]
            + list(row.run_values)
            + [f"{row.average:.2f}",
               "" if row.optimum is None else row.optimum,
               "" if row.percent is None else f"{row.percent:.2f}"]
        )
    return out.getvalue()


def render_anova_csv(report: ExperimentReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        ["algorithm_a", "algorithm_b", "f", "v1", "v2", "f_critical",
         "significant"]
    )
    for (a, b), res in report.anova:
        writer.writerow(
            [a, b, f"{res.f_statistic:.6f}", res.v1, res.v2,
             f"{res.f_critical:.2f}", str(res.significant).lower()]
        )
    return out.getvalue()


def summarize(report: ExperimentReport) -> dict[str, str]:
    """All rendered outputs keyed by suggested file name."""
    return {
        "report.txt": render_table_text(report),
        "runs.csv": render_runs_csv(report),
        "summary.csv": render_summary_csv(report),
        "anova.csv": render_anova_csv(report),
    }


def write_report(report: ExperimentReport, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in summarize(report).items():
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        written.append(path)
    return written
