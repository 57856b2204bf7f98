"""One-way ANOVA and the report arithmetic behind the results tables:
per-row averages, percent-of-optimum and pairwise F tests at the 5% level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

ALPHA = 0.05


class FCriticalLookupError(LookupError):
    """Requested (v1, v2, alpha) has no entry in the embedded table."""


# Upper 5% critical values of the F distribution, one row per denominator
# degrees of freedom v2, columns v1 = 1..6. Frozen from a numerical inverse
# CDF; two decimals, matching standard printed tables.
_F_TABLE_V1_MAX = 6
_F_CRIT_05 = {
    1: (161.45, 199.50, 215.71, 224.58, 230.16, 233.99),
    2: (18.51, 19.00, 19.16, 19.25, 19.30, 19.33),
    3: (10.13, 9.55, 9.28, 9.12, 9.01, 8.94),
    4: (7.71, 6.94, 6.59, 6.39, 6.26, 6.16),
    5: (6.61, 5.79, 5.41, 5.19, 5.05, 4.95),
    6: (5.99, 5.14, 4.76, 4.53, 4.39, 4.28),
    7: (5.59, 4.74, 4.35, 4.12, 3.97, 3.87),
    8: (5.32, 4.46, 4.07, 3.84, 3.69, 3.58),
    9: (5.12, 4.26, 3.86, 3.63, 3.48, 3.37),
    10: (4.96, 4.10, 3.71, 3.48, 3.33, 3.22),
    11: (4.84, 3.98, 3.59, 3.36, 3.20, 3.09),
    12: (4.75, 3.89, 3.49, 3.26, 3.11, 3.00),
    13: (4.67, 3.81, 3.41, 3.18, 3.03, 2.92),
    14: (4.60, 3.74, 3.34, 3.11, 2.96, 2.85),
    15: (4.54, 3.68, 3.29, 3.06, 2.90, 2.79),
    16: (4.49, 3.63, 3.24, 3.01, 2.85, 2.74),
    17: (4.45, 3.59, 3.20, 2.96, 2.81, 2.70),
    18: (4.41, 3.55, 3.16, 2.93, 2.77, 2.66),
    19: (4.38, 3.52, 3.13, 2.90, 2.74, 2.63),
    20: (4.35, 3.49, 3.10, 2.87, 2.71, 2.60),
    21: (4.32, 3.47, 3.07, 2.84, 2.68, 2.57),
    22: (4.30, 3.44, 3.05, 2.82, 2.66, 2.55),
    23: (4.28, 3.42, 3.03, 2.80, 2.64, 2.53),
    24: (4.26, 3.40, 3.01, 2.78, 2.62, 2.51),
    25: (4.24, 3.39, 2.99, 2.76, 2.60, 2.49),
    26: (4.23, 3.37, 2.98, 2.74, 2.59, 2.47),
    27: (4.21, 3.35, 2.96, 2.73, 2.57, 2.46),
    28: (4.20, 3.34, 2.95, 2.71, 2.56, 2.45),
    29: (4.18, 3.33, 2.93, 2.70, 2.55, 2.43),
    30: (4.17, 3.32, 2.92, 2.69, 2.53, 2.42),
    math.inf: (3.84, 3.00, 2.60, 2.37, 2.21, 2.10),
}


def f_critical(v1: int, v2: int | float, alpha: float = ALPHA) -> float:
    """Upper-tail F critical value from the embedded 5% table
    (v1 in 1..6, v2 in 1..30 or infinity)."""
    if alpha != ALPHA:
        raise FCriticalLookupError(f"no table for alpha={alpha}, only {ALPHA}")
    if not 1 <= v1 <= _F_TABLE_V1_MAX:
        raise FCriticalLookupError(f"v1={v1} outside tabulated range 1..{_F_TABLE_V1_MAX}")
    row = _F_CRIT_05.get(v2)
    if row is None:
        raise FCriticalLookupError(f"v2={v2} outside tabulated range 1..30, inf")
    return row[v1 - 1]


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    v1: int
    v2: int
    ss_between: float
    ss_within: float
    group_means: tuple[float, ...]
    f_critical: float
    significant: bool


def anova_oneway(groups: Sequence[Sequence[float]], alpha: float = ALPHA) -> AnovaResult:
    """One-way ANOVA over two or more groups of observations.

    SSB = sum_g n_g * (mean_g - grand_mean)^2, SSW = within-group squared
    deviations, F = (SSB / v1) / (SSW / v2). A zero SSW with positive SSB
    yields F = inf; all-constant data yields F = 0.
    """
    if len(groups) < 2:
        raise ValueError(f"need at least 2 groups, got {len(groups)}")
    for g, obs in enumerate(groups):
        if len(obs) < 2:
            raise ValueError(f"group {g} has {len(obs)} observations, need >= 2")
    sizes = [len(obs) for obs in groups]
    n_total = sum(sizes)
    m = len(groups)
    grand_mean = sum(sum(obs) for obs in groups) / n_total
    means = [sum(obs) / len(obs) for obs in groups]
    ss_between = sum(n * (mean - grand_mean) ** 2 for n, mean in zip(sizes, means))
    ss_within = sum(
        (x - mean) ** 2 for obs, mean in zip(groups, means) for x in obs
    )
    v1 = m - 1
    v2 = n_total - m
    if ss_within == 0.0:
        f_stat = math.inf if ss_between > 0.0 else 0.0
    else:
        f_stat = (ss_between / v1) / (ss_within / v2)
    crit = f_critical(v1, v2, alpha)
    return AnovaResult(
        f_statistic=f_stat,
        v1=v1,
        v2=v2,
        ss_between=ss_between,
        ss_within=ss_within,
        group_means=tuple(means),
        f_critical=crit,
        significant=f_stat > crit,
    )


def pairwise_anova(
    per_algorithm_runs: Mapping[str, Sequence[float]], alpha: float = ALPHA
) -> list[tuple[tuple[str, str], AnovaResult]]:
    """One two-group ANOVA per unordered pair of algorithms. All algorithms
    must supply the same number of observations."""
    labels = list(per_algorithm_runs)
    if len(labels) < 2:
        return []
    counts = {label: len(per_algorithm_runs[label]) for label in labels}
    if len(set(counts.values())) != 1:
        raise ValueError(f"ragged observation counts: {counts}")
    results = []
    for a, b in itertools.combinations(labels, 2):
        result = anova_oneway([per_algorithm_runs[a], per_algorithm_runs[b]], alpha)
        results.append(((a, b), result))
    return results


def average_runs(run_values: Sequence[int]) -> float:
    """Arithmetic mean of the per-run fitness values."""
    if not run_values:
        raise ValueError("no run values to average")
    return sum(run_values) / len(run_values)


def percent_of_optimum(average: float, optimum: int) -> float:
    """100 * average / optimum, rounded half-up to two decimals.

    Rounding goes through the shortest decimal repr of the float so values
    that print as x.xx5 round upward as a reader would expect.
    """
    if optimum <= 0:
        raise ValueError(f"optimum must be positive, got {optimum}")
    percent = 100.0 * average / optimum
    return float(Decimal(repr(percent)).quantize(Decimal("0.01"), ROUND_HALF_UP))


@dataclass(frozen=True)
class AlgorithmRuns:
    """One results-table row: an algorithm's runs on one dataset."""

    algorithm: str
    dataset: str
    run_values: tuple[int, ...]
    average: float
    optimum: int | None
    percent: float | None

    @classmethod
    def from_runs(cls, algorithm: str, dataset: str,
                  run_values: Sequence[int], optimum: int | None) -> "AlgorithmRuns":
        avg = average_runs(run_values)
        pct = percent_of_optimum(avg, optimum) if optimum is not None else None
        return cls(algorithm, dataset, tuple(run_values), avg, optimum, pct)
