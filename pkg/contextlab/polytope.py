"""
ContextLab Brute-Force Polytope Oracle

Vertex enumeration of {x >= 0 : Ax = b} by exhaustive basis enumeration.
Exponential, exact, and independent of the simplex in lp.py; used as the
oracle for the solver and for coupling-uniqueness checks at desk scale.
"""
import itertools
import logging
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import sympy

from .config import settings
from .core import Distribution, enumerate_joint_outcomes
from .errors import DomainError, SizeLimitError
from .lp import FeasibilityProblem

logger = logging.getLogger(__name__)


def _to_sympy(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows]
    )


def independent_system(
    problem: FeasibilityProblem,
) -> Optional[Tuple[List[List[Fraction]], List[Fraction]]]:
    """
    Equivalent full-row-rank system, or None when Ax = b is inconsistent.
    """
    if problem.num_constraints == 0:
        return [], []
    a = _to_sympy(problem.rows)
    augmented = a.row_join(_to_sympy([[v] for v in problem.rhs]))
    rank = a.rank()
    if augmented.rank() > rank:
        return None
    if rank == 0:
        return [], []
    _, pivots = a.T.rref()
    rows = [list(problem.rows[i]) for i in pivots]
    rhs = [problem.rhs[i] for i in pivots]
    return rows, rhs


def _solve_square(rows: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Gauss-Jordan on a square system; None when singular."""
    size = len(rows)
    m = [list(row) + [b] for row, b in zip(rows, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(size):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return [m[r][size] for r in range(size)]


def basic_feasible_solutions(
    problem: FeasibilityProblem,
    max_vars: Optional[int] = None,
) -> Iterator[Tuple[Fraction, ...]]:
    """Yield every vertex of the feasible polytope once, in basis order."""
    limit = max_vars if max_vars is not None else settings.MAX_ORACLE_VARS
    if problem.num_vars > limit:
        raise SizeLimitError(
            f"oracle budget exceeded: {problem.num_vars} variables, limit {limit}"
        )

    system = independent_system(problem)
    if system is None:
        return
    rows, rhs = system
    n = problem.num_vars
    if not rows:
        yield tuple([Fraction(0)] * n)
        return

    seen = set()
    for basis in itertools.combinations(range(n), len(rows)):
        square = [[row[j] for j in basis] for row in rows]
        values = _solve_square(square, rhs)
        if values is None or any(v < 0 for v in values):
            continue
        point = [Fraction(0)] * n
        for j, v in zip(basis, values):
            point[j] = v
        point = tuple(point)
        if point not in seen:
            seen.add(point)
            yield point


def brute_force_feasible(problem: FeasibilityProblem, max_vars: Optional[int] = None) -> bool:
    """Feasible iff the polytope has a vertex."""
    for _ in basic_feasible_solutions(problem, max_vars=max_vars):
        return True
    return False


# =============================================================================
# Coupling polytopes
# =============================================================================

def coupling_problem(marginals: Sequence[Distribution]) -> Tuple[FeasibilityProblem, list]:
    """
    The set of joints over the marginals' variables reproducing every
    marginal, as a feasibility problem. Returns (problem, joint tuples).
    """
    variables = []
    for d in marginals:
        if len(d.variables) != 1:
            raise DomainError(f"coupling marginals must be univariate, got {d.names}")
        variables.append(d.variables[0])
    names = [name for name, _ in variables]
    if len(set(names)) != len(names):
        raise DomainError(f"coupling marginals repeat a variable name: {names}")

    tuples = enumerate_joint_outcomes(variables)
    rows, rhs, labels = [], [], []
    for i, (name, outcomes) in enumerate(variables):
        for u in outcomes:
            rows.append([Fraction(1) if t[i] == u else Fraction(0) for t in tuples])
            rhs.append(marginals[i].probability((u,)))
            labels.append(f"{name}={u}")
    rows.append([Fraction(1)] * len(tuples))
    rhs.append(Fraction(1))
    labels.append("normalization")
    return FeasibilityProblem(len(tuples), tuple(map(tuple, rows)), tuple(rhs), tuple(labels)), tuples


def coupling_vertices(
    marginals: Sequence[Distribution],
    max_vars: Optional[int] = None,
) -> List[Distribution]:
    """All vertices of the coupling polytope as distributions."""
    problem, tuples = coupling_problem(marginals)
    variables = tuple(d.variables[0] for d in marginals)
    vertices = [
        Distribution(variables, {t: w for t, w in zip(tuples, point) if w})
        for point in basic_feasible_solutions(problem, max_vars=max_vars)
    ]
    logger.debug(f"Coupling polytope over {len(tuples)} tuples has {len(vertices)} vertices")
    return vertices
