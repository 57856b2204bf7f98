"""Weighted Max-Sat solvers built on binary particle swarm optimization,
with interchangeable neighborhood topologies, guaranteed-convergence
variants and an experiment harness with one-way ANOVA reporting."""

__version__ = "0.1.0"

from .bpso import (
    Particle,
    RunResult,
    SwarmConfig,
    SwarmState,
    init_swarm,
    run,
    step,
)
from .harness import (
    AlgorithmSpec,
    ExperimentPlan,
    ExperimentReport,
    GeneratorSpec,
    InstanceSpec,
    derive_seed,
    load_plan,
    run_experiment,
    summarize,
    write_report,
)
from .stats import (
    AlgorithmRuns,
    AnovaResult,
    anova_oneway,
    average_runs,
    f_critical,
    pairwise_anova,
    percent_of_optimum,
)
from .topology import (
    HierarchyTree,
    Topology,
    TopologyKind,
    TopologyOptions,
    make_topology,
)
from .wcnf import (
    Clause,
    FitnessEvaluator,
    WcnfInstance,
    brute_force_optimum,
    evaluate,
    generate_random,
    load_wcnf,
    parse_wcnf,
    save_wcnf,
    serialize_wcnf,
)
