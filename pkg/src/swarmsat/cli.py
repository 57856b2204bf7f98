"""Command-line interface.

Subcommands: solve, gen, oracle, experiment, anova. Exit codes: 0 success,
2 input error, 3 capability refusal (oracle size bound), 4 total failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .bpso import SwarmConfig, run
from .harness import PlanError, load_plan, run_experiment, write_report
from .stats import FCriticalLookupError, pairwise_anova, percent_of_optimum
from .topology import TopologyOptions
from .wcnf import (
    InstanceTooLargeError,
    WcnfError,
    brute_force_optimum,
    generate_random,
    load_wcnf,
    save_wcnf,
)
import dataclasses

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REFUSED = 3
EXIT_TOTAL_FAILURE = 4
EXIT_USAGE = 64

TOPOLOGY_NAMES = ("gbest", "lbest", "grid", "hierarchy")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="swarmsat",
                     description="Weighted Max-Sat via binary particle swarms")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="run one solver on a WCNF file")
    solve.add_argument("instance", help="path to a DIMACS WCNF file")
    solve.add_argument("--topology", choices=TOPOLOGY_NAMES, default="gbest")
    solve.add_argument("--gc", action="store_true",
                       help="guaranteed-convergence update for the best particle")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--swarm-size", type=int, default=30)
    solve.add_argument("--vmax", type=float, default=4.0)
    solve.add_argument("--w-start", type=float, default=0.9)
    solve.add_argument("--w-decrement", type=float, default=0.0005)
    solve.add_argument("--w-floor", type=float, default=0.4)
    solve.add_argument("--stagnation", type=int, default=1500,
                       help="iterations without improvement that end the run")
    solve.add_argument("--max-iterations", type=int, default=100_000)
    solve.add_argument("--grid-rows", type=int)
    solve.add_argument("--grid-cols", type=int)
    solve.add_argument("--start-degree", type=int, default=15)
    solve.add_argument("--adapt-interval", type=int, default=200)
    solve.add_argument("--min-degree", type=int, default=2)
    solve.add_argument("--assignment", action="store_true",
                       help="also print the best assignment as a bit string")

    gen = sub.add_parser("gen", help="generate a random WCNF instance")
    gen.add_argument("--vars", type=int, required=True)
    gen.add_argument("--clauses", type=int, required=True)
    gen.add_argument("--len", type=int, required=True, dest="clause_len")
    gen.add_argument("--wmin", type=int, default=1)
    gen.add_argument("--wmax", type=int, default=100)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--with-opt", action="store_true",
                     help="embed the exact optimum (requires --vars <= 24)")

    oracle = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    oracle.add_argument("instance")
    oracle.add_argument("--assignment", action="store_true")

    experiment = sub.add_parser("experiment", help="run a full experiment plan")
    experiment.add_argument("plan", help="path to a TOML plan file")
    experiment.add_argument("--out-dir", required=True)
    experiment.add_argument("--quiet", action="store_true",
                            help="suppress per-run completion lines")

    anova = sub.add_parser("anova",
                           help="pairwise significance from an algorithm,value CSV")
    anova.add_argument("csv", help="CSV with columns algorithm,value")
    return parser


def _cmd_solve(args) -> int:
    try:
        instance = load_wcnf(args.instance)
    except (OSError, WcnfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = SwarmConfig(
        swarm_size=args.swarm_size,
        v_max=args.vmax,
        v_min=-args.vmax,
        w_start=args.w_start,
        w_decrement=args.w_decrement,
        w_floor=args.w_floor,
        stagnation_window=args.stagnation,
        max_iterations=args.max_iterations,
        gc_enabled=args.gc,
        seed=args.seed,
    )
    options = TopologyOptions(
        grid_rows=args.grid_rows,
        grid_cols=args.grid_cols,
        start_degree=args.start_degree,
        adapt_interval=args.adapt_interval,
        min_degree=args.min_degree,
    )
    result = run(instance, args.topology, config, topology_options=options)
    print(f"best={result.best_fitness}")
    if instance.known_optimum is not None:
        pct = percent_of_optimum(result.best_fitness, instance.known_optimum)
        print(f"optimum={instance.known_optimum}")
        print(f"percent={pct:.2f}")
    print(f"iterations={result.iterations_run}")
    print(f"converged={str(result.converged).lower()}")
    if args.assignment:
        print("assignment=" + "".join("1" if b else "0" for b in result.best_assignment))
    return EXIT_OK


def _cmd_gen(args) -> int:
    try:
        instance = generate_random(args.vars, args.clauses, args.clause_len,
                                   args.wmin, args.wmax, args.seed)
    except WcnfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.with_opt:
        try:
            optimum, _ = brute_force_optimum(instance)
        except InstanceTooLargeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_REFUSED
        instance = dataclasses.replace(instance, known_optimum=optimum)
    try:
        save_wcnf(instance, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {args.out} ({instance.num_vars} vars, "
          f"{instance.num_clauses} clauses)")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        instance = load_wcnf(args.instance)
    except (OSError, WcnfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        optimum, assignment = brute_force_optimum(instance)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    print(f"optimum={optimum}")
    if args.assignment:
        print("assignment=" + "".join("1" if b else "0" for b in assignment))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        plan = load_plan(args.plan)
    except (OSError, PlanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    progress = None
    if not args.quiet:
        def progress(record):
            print(
                f"done algorithm={record.algorithm} dataset={record.dataset} "
                f"run={record.run_index} best={record.best_fitness} "
                f"iterations={record.iterations_run}",
                file=sys.stderr,
            )
    report = run_experiment(plan, progress=progress)
    for label, reason in report.exclusions:
        print(f"excluded {label}: {reason}", file=sys.stderr)
    if not report.rows:
        print("error: no instance could be loaded", file=sys.stderr)
        return EXIT_TOTAL_FAILURE
    written = write_report(report, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_anova(args) -> int:
    groups: dict[str, list[float]] = {}
    try:
        with open(args.csv, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or not {"algorithm", "value"} <= set(reader.fieldnames):
                print("error: CSV needs columns algorithm,value", file=sys.stderr)
                return EXIT_INPUT
            for row in reader:
                groups.setdefault(row["algorithm"], []).append(float(row["value"]))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(groups) < 2:
        print("error: need at least 2 algorithms", file=sys.stderr)
        return EXIT_INPUT
    try:
        pairs = pairwise_anova(groups)
    except (ValueError, FCriticalLookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for (a, b), res in pairs:
        verdict = "significant" if res.significant else "not-significant"
        print(f"{a} vs {b}: F={res.f_statistic:.4f} v1={res.v1} v2={res.v2} "
              f"Fcrit={res.f_critical:.2f} {verdict}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "gen": _cmd_gen,
        "oracle": _cmd_oracle,
        "experiment": _cmd_experiment,
        "anova": _cmd_anova,
    }
    return handlers[args.command](args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
