"""
ContextLab Exact LP Feasibility

Decides {x >= 0 : Ax = b} in exact rational arithmetic with a phase-1
simplex (Bland's rule). Returns either a feasible point or a Farkas
certificate y with y^T A <= 0 and y^T b > 0. Both are re-checked before
they leave this module.
"""
import csv
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple, Union

from .config import settings
from .errors import DimensionError, SizeLimitError, SolverError

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


# =============================================================================
# Problem and result types
# =============================================================================

@dataclass(frozen=True)
class FeasibilityProblem:
    """Ax = b, x >= 0 with num_vars columns. Row labels are for dumps only."""
    num_vars: int
    rows: Tuple[Tuple[Fraction, ...], ...]
    rhs: Tuple[Fraction, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise DimensionError(f"negative variable count: {self.num_vars}")
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.rows)
        rhs = tuple(Fraction(v) for v in self.rhs)
        if len(rows) != len(rhs):
            raise DimensionError(f"{len(rows)} constraint rows but {len(rhs)} right-hand sides")
        for i, row in enumerate(rows):
            if len(row) != self.num_vars:
                raise DimensionError(
                    f"constraint {i} has {len(row)} coefficients, expected {self.num_vars}"
                )
        if self.labels and len(self.labels) != len(rows):
            raise DimensionError(f"{len(self.labels)} labels for {len(rows)} constraints")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def num_constraints(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Feasible:
    point: Tuple[Fraction, ...]
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    certificate: Tuple[Fraction, ...]
    feasible = False


FeasibilityResult = Union[Feasible, Infeasible]


# =============================================================================
# Independent re-checkers
# =============================================================================

def check_point(problem: FeasibilityProblem, point: Sequence[Fraction]) -> bool:
    """True iff point satisfies every constraint exactly and is nonnegative."""
    if len(point) != problem.num_vars:
        return False
    if any(v < 0 for v in point):
        return False
    for row, rhs in zip(problem.rows, problem.rhs):
        if sum((a * x for a, x in zip(row, point) if a), ZERO) != rhs:
            return False
    return True


def check_certificate(problem: FeasibilityProblem, certificate: Sequence[Fraction]) -> bool:
    """True iff y^T A <= 0 componentwise and y^T b > 0."""
    if len(certificate) != problem.num_constraints:
        return False
    for j in range(problem.num_vars):
        column = sum(
            (y * row[j] for y, row in zip(certificate, problem.rows) if y and row[j]), ZERO
        )
        if column > 0:
            return False
    return sum((y * b for y, b in zip(certificate, problem.rhs)), ZERO) > 0


# =============================================================================
# Phase-1 simplex
# =============================================================================

class _PhaseOneTableau:
    """
    Fraction-free tableau for min 1^T s  s.t.  A'x + s = b', x, s >= 0.

    Each constraint row is sign-normalized so b' >= 0 and multiplied by the
    lcm of its denominators, so the tableau starts out integral. Pivots use
    Bareiss division: every stored entry is the true entry times `scale`
    (the previous pivot element), and the division by the old scale is
    exact. scale stays positive, so signs of stored and true entries agree.

    The last column is the right-hand side and the last row holds the
    phase-1 reduced costs. Artificial columns are kept so the dual
    y = c_B^T B^-1 can be read off their reduced costs.
    """

    def __init__(self, problem: FeasibilityProblem):
        self.n = problem.num_vars
        self.m = problem.num_constraints
        self.multipliers: List[int] = []
        self.rows: List[List[int]] = []

        for i, (row, rhs) in enumerate(zip(problem.rows, problem.rhs)):
            sign = -1 if rhs < 0 else 1
            k = 1
            for v in row:
                k = lcm(k, v.denominator)
            k = lcm(k, rhs.denominator)
            full = [int(sign * k * a) for a in row] + [0] * self.m + [int(sign * k * rhs)]
            full[self.n + i] = 1
            self.rows.append(full)
            self.multipliers.append(sign * k)

        self.objective = [-sum(column) for column in zip(*self.rows)]
        for k in range(self.m):
            self.objective[self.n + k] = 0
        self.basis = [self.n + i for i in range(self.m)]
        self.scale = 1
        self.pivots = 0

    def _entering(self) -> Optional[int]:
        # Artificials never re-enter; Bland picks the lowest improving index.
        for j in range(self.n):
            if self.objective[j] < 0:
                return j
        return None

    def _leaving(self, j: int) -> Optional[int]:
        best = None
        for i, row in enumerate(self.rows):
            a = row[j]
            if a <= 0:
                continue
            if best is None:
                best = i
                continue
            # Compare rhs_i / a_i with rhs_best / a_best without dividing.
            lhs = row[-1] * self.rows[best][j]
            rhs = self.rows[best][-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best = i
        return best

    def _eliminate(self, row: List[int], pivot_row: List[int], j: int, p: int) -> List[int]:
        d = self.scale
        f = row[j]
        if f == 0:
            if p == d:
                return row
            return [p * a // d for a in row]
        return [(p * a - f * b) // d for a, b in zip(row, pivot_row)]

    def _pivot(self, i: int, j: int):
        pivot_row = self.rows[i]
        p = pivot_row[j]
        for k, row in enumerate(self.rows):
            if k != i:
                self.rows[k] = self._eliminate(row, pivot_row, j, p)
        self.objective = self._eliminate(self.objective, pivot_row, j, p)
        self.scale = p
        self.basis[i] = j
        self.pivots += 1

    def run(self) -> FeasibilityResult:
        while True:
            j = self._entering()
            if j is None:
                break
            i = self._leaving(j)
            if i is None:
                # Phase-1 objective is bounded below by zero.
                raise SolverError(f"phase-1 simplex reported unbounded column {j}")
            self._pivot(i, j)

        residual = sum(row[-1] for row, v in zip(self.rows, self.basis) if v >= self.n)
        logger.debug(f"Phase-1 finished after {self.pivots} pivots, residual {Fraction(residual, self.scale)}")

        if residual == 0:
            point = [ZERO] * self.n
            for row, v in zip(self.rows, self.basis):
                if v < self.n:
                    point[v] = Fraction(row[-1], self.scale)
            return Feasible(tuple(point))

        # Dual of the scaled system, mapped back through each row's multiplier.
        certificate = []
        for k, multiplier in enumerate(self.multipliers):
            y = ONE - Fraction(self.objective[self.n + k], self.scale)
            certificate.append(y * multiplier)
        return Infeasible(tuple(certificate))


def solve_feasibility(
    problem: FeasibilityProblem,
    max_vars: Optional[int] = None,
) -> FeasibilityResult:
    """
    Decide feasibility of problem exactly.

    Raises SizeLimitError above max_vars (default settings.MAX_LP_VARS) and
    SolverError if the answer fails its own re-check.
    """
    limit = max_vars if max_vars is not None else settings.MAX_LP_VARS
    if problem.num_vars > limit:
        raise SizeLimitError(
            f"LP has {problem.num_vars} variables, limit is {limit} (see --max-vars)"
        )

    if problem.num_constraints == 0:
        return Feasible(tuple([ZERO] * problem.num_vars))

    result = _PhaseOneTableau(problem).run()

    if isinstance(result, Feasible):
        if not check_point(problem, result.point):
            raise SolverError("feasible point failed re-check")
    elif not check_certificate(problem, result.certificate):
        raise SolverError("Farkas certificate failed re-check")
    return result


# =============================================================================
# Debug dump
# =============================================================================

def dump_tsv(
    problem: FeasibilityProblem,
    path: str,
    column_labels: Optional[Sequence[str]] = None,
):
    """Write the constraint matrix as TSV: one row per constraint, rhs last."""
    columns = list(column_labels) if column_labels else [f"x{j}" for j in range(problem.num_vars)]
    labels = problem.labels or tuple(f"r{i}" for i in range(problem.num_constraints))
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(["constraint"] + columns + ["rhs"])
        for label, row, rhs in zip(labels, problem.rows, problem.rhs):
            writer.writerow([label] + [str(v) for v in row] + [str(rhs)])
    logger.info(f"Dumped LP ({problem.num_constraints}x{problem.num_vars}) to {path}")
