"""Weighted CNF instances: data model, DIMACS-WCNF I/O, random generation,
fitness evaluation and an exhaustive optimum oracle for small instances.

File format (all clauses soft):

    c <free-form comment>
    c opt <int>       known optimal satisfied weight (optional)
    c name <label>    instance label (optional)
    p wcnf <nvars> <nclauses>
    <weight> <lit> <lit> ... 0

Comments may appear anywhere; tokens are separated by one or more spaces and
lines end with a newline. Weights are positive integers, literals are nonzero
signed integers with |lit| <= nvars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Largest num_vars the exhaustive oracle will enumerate (2**24 assignments).
ORACLE_MAX_VARS = 24


class WcnfError(ValueError):
    """Base class for instance construction and parsing errors."""


class WcnfParseError(WcnfError):
    """Malformed DIMACS-WCNF input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message}, line {line}"
        super().__init__(message)


class DimensionError(WcnfError):
    """Assignment length does not match the instance's variable count."""


class InstanceTooLargeError(WcnfError):
    """Instance exceeds the exhaustive oracle's enumeration bound."""


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals with a positive integer weight.

    A positive literal k means "variable k is true", a negative literal -k
    means "variable k is false". Variable range checks happen at instance
    construction since a clause alone does not know num_vars.
    """

    literals: tuple[int, ...]
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        if not self.literals:
            raise WcnfError("clause has no literals")
        if any(lit == 0 for lit in self.literals):
            raise WcnfError("literal 0 is not allowed")
        if self.weight < 1:
            raise WcnfError(f"clause weight must be >= 1, got {self.weight}")


@dataclass(frozen=True)
class WcnfInstance:
    """Immutable weighted CNF formula over variables 1..num_vars."""

    num_vars: int
    clauses: tuple[Clause, ...]
    known_optimum: int | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.num_vars < 1:
            raise WcnfError(f"num_vars must be >= 1, got {self.num_vars}")
        if not self.clauses:
            raise WcnfError("instance has no clauses")
        for clause in self.clauses:
            for lit in clause.literals:
                if abs(lit) > self.num_vars:
                    raise WcnfError(f"literal {lit} out of range 1..{self.num_vars}")
        if self.known_optimum is not None:
            if self.known_optimum < 1:
                raise WcnfError("known_optimum must be positive")
            if self.known_optimum > self.total_weight:
                raise WcnfError(
                    f"known_optimum {self.known_optimum} exceeds "
                    f"total weight {self.total_weight}"
                )

    @property
    def total_weight(self) -> int:
        return sum(c.weight for c in self.clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def evaluate(instance: WcnfInstance, assignment: Sequence[bool]) -> int:
    """Total weight of clauses satisfied by the assignment.

    Reference implementation: a plain scan over clauses. The solver's hot
    loop uses FitnessEvaluator, which must agree with this function.
    """
    if len(assignment) != instance.num_vars:
        raise DimensionError(
            f"assignment has {len(assignment)} bits, instance has "
            f"{instance.num_vars} variables"
        )
    total = 0
    for clause in instance.clauses:
        for lit in clause.literals:
            value = assignment[lit - 1] if lit > 0 else not assignment[-lit - 1]
            if value:
                total += clause.weight
                break
    return total


class FitnessEvaluator:
    """Vectorized satisfied-weight computation for one instance.

    Precomputes flat literal arrays so that evaluating a numpy bool vector
    costs a handful of array operations regardless of clause count.
    """

    def __init__(self, instance: WcnfInstance):
        self.num_vars = instance.num_vars
        self.total_weight = instance.total_weight
        lit_var = []
        lit_neg = []
        starts = []
        for clause in instance.clauses:
            starts.append(len(lit_var))
            for lit in clause.literals:
                lit_var.append(abs(lit) - 1)
                lit_neg.append(lit < 0)
        self._lit_var = np.asarray(lit_var, dtype=np.intp)
        self._lit_neg = np.asarray(lit_neg, dtype=bool)
        self._starts = np.asarray(starts, dtype=np.intp)
        self._weights = np.asarray([c.weight for c in instance.clauses], dtype=np.int64)

    def __call__(self, bits: np.ndarray) -> int:
        lit_true = bits[self._lit_var] ^ self._lit_neg
        satisfied = np.logical_or.reduceat(lit_true, self._starts)
        return int(self._weights[satisfied].sum())


def parse_wcnf(text: str, name: str = "") -> WcnfInstance:
    """Parse DIMACS-WCNF text into an instance.

    A ``c opt <int>`` comment populates known_optimum and a ``c name <label>``
    comment the name. Errors report the 1-based line number.
    """
    num_vars = None
    declared_clauses = None
    known_optimum = None
    clauses: list[Clause] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "c":
            if len(tokens) >= 3 and tokens[1] == "opt":
                try:
                    known_optimum = int(tokens[2])
                except ValueError:
                    raise WcnfParseError(f"bad opt value {tokens[2]!r}", lineno) from None
            elif len(tokens) >= 3 and tokens[1] == "name":
                name = " ".join(tokens[2:])
            continue
        if tokens[0] == "p":
            if num_vars is not None:
                raise WcnfParseError("duplicate header", lineno)
            if len(tokens) != 4 or tokens[1] != "wcnf":
                raise WcnfParseError(f"malformed header {line!r}", lineno)
            try:
                num_vars = int(tokens[2])
                declared_clauses = int(tokens[3])
            except ValueError:
                raise WcnfParseError(f"malformed header {line!r}", lineno) from None
            if num_vars < 1:
                raise WcnfParseError(f"num_vars must be >= 1, got {num_vars}", lineno)
            continue
        if num_vars is None:
            raise WcnfParseError("clause before header", lineno)
        try:
            numbers = [int(tok) for tok in tokens]
        except ValueError:
            raise WcnfParseError(f"non-integer token in clause {line!r}", lineno) from None
        weight = numbers[0]
        if weight < 1:
            raise WcnfParseError(f"clause weight must be >= 1, got {weight}", lineno)
        if numbers[-1] != 0:
            raise WcnfParseError("clause line does not end with 0", lineno)
        literals = numbers[1:-1]
        if not literals:
            raise WcnfParseError("zero-length clause", lineno)
        for lit in literals:
            if lit == 0:
                raise WcnfParseError("literal 0 inside clause", lineno)
            if abs(lit) > num_vars:
                raise WcnfParseError(f"literal {lit} out of range", lineno)
        clauses.append(Clause(tuple(literals), weight))

    if num_vars is None:
        raise WcnfParseError("missing header", line=None)
    if len(clauses) != declared_clauses:
        raise WcnfParseError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}",
            line=None,
        )
    return WcnfInstance(num_vars, tuple(clauses), known_optimum, name)


def serialize_wcnf(instance: WcnfInstance) -> str:
    """Canonical DIMACS-WCNF text; parse_wcnf(serialize_wcnf(x)) == x."""
    lines = []
    if instance.known_optimum is not None:
        lines.append(f"c opt {instance.known_optimum}")
    if instance.name:
        lines.append(f"c name {instance.name}")
    lines.append(f"p wcnf {instance.num_vars} {instance.num_clauses}")
    for clause in instance.clauses:
        lines.append(" ".join(str(x) for x in (clause.weight, *clause.literals, 0)))
    return "\n".join(lines) + "\n"


def load_wcnf(path) -> WcnfInstance:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_wcnf(handle.read())


def save_wcnf(instance: WcnfInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(serialize_wcnf(instance))


def generate_random(
    num_vars: int,
    num_clauses: int,
    clause_len: int,
    weight_lo: int,
    weight_hi: int,
    seed: int,
) -> WcnfInstance:
    """Seeded random instance: each clause picks clause_len distinct variables
    uniformly without replacement, negates each with probability 1/2 and draws
    a weight uniformly from [weight_lo, weight_hi]. Same seed, same instance.
    """
    if num_vars < 1:
        raise WcnfError(f"num_vars must be >= 1, got {num_vars}")
    if num_clauses < 1:
        raise WcnfError(f"num_clauses must be >= 1, got {num_clauses}")
    if not 1 <= clause_len <= num_vars:
        raise WcnfError(
            f"clause_len must be in 1..{num_vars}, got {clause_len}"
        )
    if not 1 <= weight_lo <= weight_hi:
        raise WcnfError(
            f"need 1 <= weight_lo <= weight_hi, got {weight_lo}..{weight_hi}"
        )
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(num_clauses):
        variables = rng.choice(num_vars, size=clause_len, replace=False) + 1
        signs = rng.random(clause_len) < 0.5
        literals = tuple(
            -int(v) if neg else int(v) for v, neg in zip(variables, signs)
        )
        weight = int(rng.integers(weight_lo, weight_hi + 1))
        clauses.append(Clause(literals, weight))
    name = f"rand-v{num_vars}-c{num_clauses}-k{clause_len}-s{seed}"
    return WcnfInstance(num_vars, tuple(clauses), None, name)


def brute_force_optimum(instance: WcnfInstance) -> tuple[int, tuple[bool, ...]]:
    """Exact optimum by enumerating all 2**num_vars assignments.

    Ties break toward the lowest assignment read as a big-endian integer
    (variable 1 most significant). Refuses instances with more than
    ORACLE_MAX_VARS variables.
    """
    n = instance.num_vars
    if n > ORACLE_MAX_VARS:
        raise InstanceTooLargeError(
            f"{n} variables exceed the oracle bound of {ORACLE_MAX_VARS}"
        )
    # Assignment index x encodes variable v at bit (n - v), so x itself is the
    # big-endian key used for tie-breaking and argmax picks the lowest.
    xs = np.arange(1 << n, dtype=np.uint32)
    falsified_weight = np.zeros(1 << n, dtype=np.int64)
    for clause in instance.clauses:
        mask = 0
        value = 0
        tautology = False
        for lit in clause.literals:
            bit = 1 << (n - abs(lit))
            if lit < 0:
                if mask & bit and not value & bit:
                    tautology = True  # +v seen earlier
                value |= bit
            elif mask & bit and value & bit:
                tautology = True  # -v seen earlier
            mask |= bit
        if tautology:
            continue  # clause contains v and -v, never falsified
        falsified = (xs & np.uint32(mask)) == np.uint32(value)
        falsified_weight[falsified] += clause.weight
    best_x = int(np.argmin(falsified_weight))
    best_weight = instance.total_weight - int(falsified_weight[best_x])
    bits = tuple(bool((best_x >> (n - v)) & 1) for v in range(1, n + 1))
    return best_weight, bits
