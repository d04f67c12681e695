"""
ContextLab Contextuality Deciders

KS contextuality (global distribution over all observables), coupling
criteria with the Uniqueness property, and C contextuality over incidence
pairs (q, c), with the multimaximal criterion giving CbD 2.0.

Every decider reduces to one exact marginal problem solved by lp.py, so
each verdict carries either a global witness or a Farkas certificate.
"""
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .config import settings
from .core import (
    Behavior,
    DisturbanceWitness,
    Distribution,
    Variables,
    check_nondisturbance,
    enumerate_joint_outcomes,
    format_outcome_key,
    format_rational,
    marginalize,
)
from .errors import (
    CriterionError,
    DisturbingBehaviorError,
    DomainError,
    FormatError,
    SizeLimitError,
)
from .lp import (
    Feasible,
    FeasibilityProblem,
    check_certificate,
    check_point,
    solve_feasibility,
)
from .polytope import coupling_vertices

logger = logging.getLogger(__name__)


def incidence_name(observable: str, context: str) -> str:
    """Name of the copy of observable measured in context."""
    return f"{observable}@{context}"


def row_name(context: str) -> str:
    return f"row:{context}"


def column_name(observable: str) -> str:
    return f"col:{observable}"


# =============================================================================
# Domain classes and coupling criteria
# =============================================================================

@dataclass(frozen=True)
class DomainClass:
    """A decidable class of behaviors a theory is defined on."""
    name: str
    predicate: Callable[[Behavior], bool]
    description: str

    def contains(self, b: Behavior) -> bool:
        return bool(self.predicate(b))

    def check(self, b: Behavior):
        if not self.contains(b):
            raise DomainError(f"behavior outside domain class '{self.name}': {self.description}")


ALL_BEHAVIORS = DomainClass("all", lambda b: True, "any finite behavior")
BINARY_OBSERVABLES = DomainClass(
    "binary", lambda b: b.is_binary(), "every observable must have at most two outcomes"
)

Event = Tuple[str, Callable[[tuple], bool]]


def pairwise_equality_events(n: int) -> List[Event]:
    """The events q_i = q_j for every pair i < j."""
    return [
        (f"q{i}=q{j}", partial(_equal_at, i, j))
        for i in range(n)
        for j in range(i + 1, n)
    ]


def _equal_at(i: int, j: int, outcome: tuple) -> bool:
    return outcome[i] == outcome[j]


@dataclass(frozen=True)
class CouplingCriterion:
    """
    A rule picking one joint for a family of copies of an observable.

    maximized_events names the events whose probabilities the criterion's
    joints maximize; verify_uniqueness_property checks that property by
    enumerating the coupling polytope.
    """
    name: str
    couple: Callable[[Sequence[Distribution]], Distribution]
    domain: DomainClass
    maximized_events: Callable[[int], List[Event]]
    theory: str


def multimaximal_coupling(marginals: Sequence[Distribution]) -> Distribution:
    """
    Comonotone coupling of binary marginals.

    With p_i the probability of the positive (second declared) outcome, the
    joint is the law of (1[U <= p_i])_i for one uniform U. Every pair then
    has P(q_i = q_j) = 1 - |p_i - p_j|, the largest value their marginals allow.
    """
    if not marginals:
        raise DomainError("multimaximal coupling needs at least one marginal")
    variables = []
    for d in marginals:
        if len(d.variables) != 1:
            raise DomainError(f"coupling marginals must be univariate, got {d.names}")
        variables.append(d.variables[0])
    outcomes = variables[0][1]
    if any(v[1] != outcomes for v in variables):
        raise DomainError("coupling marginals use different outcome sets")
    if len(outcomes) > 2:
        raise DomainError(
            f"multimaximal coupling requires binary observables, got {len(outcomes)} outcomes"
        )
    names = [name for name, _ in variables]
    if len(set(names)) != len(names):
        raise DomainError(f"coupling marginals repeat a variable name: {names}")

    variables = tuple(variables)
    if len(outcomes) == 1:
        return Distribution.point_mass(variables, (outcomes[0],) * len(variables))

    negative, positive = outcomes
    p = [d.probability((positive,)) for d in marginals]
    thresholds = sorted(set([Fraction(0), Fraction(1)] + p))

    weights: Dict[tuple, Fraction] = {}
    for low, high in zip(thresholds, thresholds[1:]):
        atom = tuple(positive if p_i >= high else negative for p_i in p)
        weights[atom] = weights.get(atom, Fraction(0)) + (high - low)
    return Distribution(variables, weights)


MULTIMAXIMAL = CouplingCriterion(
    name="multimaximal",
    couple=multimaximal_coupling,
    domain=BINARY_OBSERVABLES,
    maximized_events=pairwise_equality_events,
    theory="cbd2",
)

CRITERIA = {"multimaximal": MULTIMAXIMAL}


def get_criterion(name: str) -> CouplingCriterion:
    if name in CRITERIA:
        return CRITERIA[name]
    raise FormatError(f"unknown coupling criterion: {name}")


def apply_criterion(crit: CouplingCriterion, marginals: Sequence[Distribution]) -> Distribution:
    """Run the criterion and insist the joint reproduces every marginal exactly."""
    try:
        joint = crit.couple(marginals)
    except DomainError:
        raise
    except Exception as e:
        raise CriterionError(f"criterion {crit.name} failed: {e}") from e

    expected = tuple(d.variables[0] for d in marginals)
    if joint.variables != expected:
        raise CriterionError(f"criterion {crit.name} returned variables {joint.names}")
    problems = joint.violations(f"criterion {crit.name}")
    if problems:
        raise CriterionError("; ".join(problems))
    for d in marginals:
        if marginalize(joint, d.names) != d:
            raise CriterionError(f"criterion {crit.name} does not reproduce the marginal of {d.names[0]}")
    return joint


# =============================================================================
# Verdicts
# =============================================================================

@dataclass(frozen=True, eq=False)
class Verdict:
    """
    Outcome of a decider: the 0/1 indicator plus what proves it.

    Noncontextual verdicts carry a witness over the LP variables; contextual
    ones carry a Farkas certificate for problem, or (strict theory only) the
    disturbance that made the behavior contextual.
    """
    theory: str
    contextual: bool
    variables: Variables = ()
    constraints: Tuple[Tuple[str, Distribution], ...] = ()
    problem: Optional[FeasibilityProblem] = None
    witness: Optional[Distribution] = None
    certificate: Optional[Tuple[Fraction, ...]] = None
    disturbance: Optional[DisturbanceWitness] = None

    @property
    def value(self) -> int:
        return 1 if self.contextual else 0

    @property
    def label(self) -> str:
        return "contextual" if self.contextual else "noncontextual"

    def to_json(self) -> dict:
        data = {"theory": self.theory, "verdict": self.label}
        if self.witness is not None:
            data["witness"] = self.witness.to_json()
        if self.certificate is not None:
            data["certificate"] = [format_rational(y) for y in self.certificate]
            data["constraints"] = list(self.problem.labels) if self.problem else []
        if self.disturbance is not None:
            data["disturbance"] = self.disturbance.to_json()
        return data


def marginal_problem(
    variables: Variables,
    constraints: Sequence[Tuple[str, Distribution]],
    max_vars: Optional[int] = None,
) -> Tuple[FeasibilityProblem, list]:
    """
    One LP variable per joint outcome of variables; one equality per
    (constraint, outcome of its variables); plus normalization.
    """
    limit = max_vars if max_vars is not None else settings.MAX_LP_VARS
    size = 1
    for _, outcomes in variables:
        size *= len(outcomes)
    if size > limit:
        raise SizeLimitError(f"marginal problem needs {size} variables, limit is {limit}")

    tuples = enumerate_joint_outcomes(variables)
    names = [name for name, _ in variables]
    rows, rhs, labels = [], [], []
    for label, d in constraints:
        indices = []
        for name in d.names:
            if name not in names:
                raise DomainError(f"constraint {label} mentions unknown variable {name}")
            indices.append(names.index(name))
        columns: Dict[tuple, List[int]] = {}
        for j, t in enumerate(tuples):
            columns.setdefault(tuple(t[i] for i in indices), []).append(j)
        for u in enumerate_joint_outcomes(d.variables):
            row = [Fraction(0)] * len(tuples)
            for j in columns.get(u, []):
                row[j] = Fraction(1)
            rows.append(tuple(row))
            rhs.append(d.probability(u))
            labels.append(f"{label}:{format_outcome_key(u)}")
    rows.append(tuple([Fraction(1)] * len(tuples)))
    rhs.append(Fraction(1))
    labels.append("normalization")
    return FeasibilityProblem(len(tuples), tuple(rows), tuple(rhs), tuple(labels)), tuples


def _decide(
    theory: str,
    variables: Variables,
    constraints: Sequence[Tuple[str, Distribution]],
    max_vars: Optional[int],
) -> Verdict:
    problem, tuples = marginal_problem(variables, constraints, max_vars=max_vars)
    result = solve_feasibility(problem, max_vars=max_vars)
    logger.info(
        f"Decided {theory}: {problem.num_vars} variables, {problem.num_constraints} "
        f"constraints -> {'noncontextual' if result.feasible else 'contextual'}"
    )
    if isinstance(result, Feasible):
        witness = Distribution(variables, {t: x for t, x in zip(tuples, result.point) if x})
        return Verdict(theory, False, variables, tuple(constraints), problem, witness=witness)
    return Verdict(
        theory, True, variables, tuple(constraints), problem, certificate=result.certificate
    )


# =============================================================================
# Deciders
# =============================================================================

def decide_ks(b: Behavior, max_vars: Optional[int] = None) -> Verdict:
    """KS contextuality; defined only on nondisturbing behaviors."""
    witness = check_nondisturbance(b)
    if witness is not None:
        raise DisturbingBehaviorError(witness)
    scenario = b.scenario
    variables = scenario.variables(scenario.observable_names)
    constraints = [(c.name, b.distribution(c.name)) for c in scenario.contexts]
    return _decide("ks", variables, constraints, max_vars)


def decide_c(
    b: Behavior,
    crit: CouplingCriterion = MULTIMAXIMAL,
    max_vars: Optional[int] = None,
    max_incidences: Optional[int] = None,
) -> Verdict:
    """
    C contextuality: is there a joint over all incidence copies (q, c) whose
    row marginals are the context distributions and whose column marginals
    are the criterion's couplings?
    """
    crit.domain.check(b)
    scenario = b.scenario
    incidences = scenario.incidences()
    limit = max_incidences if max_incidences is not None else settings.MAX_INCIDENCES
    if len(incidences) > limit:
        raise SizeLimitError(f"{len(incidences)} incidence pairs, limit is {limit}")

    variables = tuple((incidence_name(q, c), scenario.outcomes(q)) for q, c in incidences)
    constraints = []
    for c in scenario.contexts:
        names = [incidence_name(q, c.name) for q in c.observables]
        constraints.append((row_name(c.name), b.distribution(c.name).renamed(names)))
    for q in scenario.observable_names:
        contexts = scenario.contexts_of(q)
        if not contexts:
            continue
        marginals = [b.marginal(c, [q]).renamed([incidence_name(q, c)]) for c in contexts]
        constraints.append((column_name(q), apply_criterion(crit, marginals)))
    return _decide(crit.theory, variables, constraints, max_vars)


def decide_strict(b: Behavior, max_vars: Optional[int] = None) -> Verdict:
    """Disturbing behaviors are contextual; nondisturbing ones follow KS."""
    witness = check_nondisturbance(b)
    if witness is not None:
        return Verdict("strict", True, disturbance=witness)
    return replace(decide_ks(b, max_vars=max_vars), theory="strict")


def get_decider(theory: str, max_vars: Optional[int] = None) -> Callable[[Behavior], Verdict]:
    """Decider for a theory tag: ks, cbd2 or strict."""
    if theory == "ks":
        return partial(decide_ks, max_vars=max_vars)
    if theory == "cbd2":
        return partial(decide_c, crit=MULTIMAXIMAL, max_vars=max_vars)
    if theory == "strict":
        return partial(decide_strict, max_vars=max_vars)
    raise FormatError(f"unknown theory: {theory}")


def domain_of(theory: str) -> DomainClass:
    return BINARY_OBSERVABLES if theory == "cbd2" else ALL_BEHAVIORS


# =============================================================================
# Re-checking
# =============================================================================

def verify_verdict(verdict: Verdict) -> List[str]:
    """Independent re-check of a verdict's evidence. Empty list = sound."""
    if verdict.disturbance is not None:
        if verdict.disturbance.first == verdict.disturbance.second:
            return ["disturbance witness marginals are equal"]
        return []
    if verdict.problem is None:
        return ["verdict carries no LP"]

    problems = []
    if verdict.contextual:
        if verdict.certificate is None or not check_certificate(verdict.problem, verdict.certificate):
            problems.append("Farkas certificate fails re-check")
        return problems

    if verdict.witness is None:
        return ["noncontextual verdict without witness"]
    if not check_point(verdict.problem, verdict.witness.dense()):
        problems.append("witness does not satisfy the LP")
    for label, required in verdict.constraints:
        if marginalize(verdict.witness, required.names) != required:
            problems.append(f"witness marginal on {label} differs")
    return problems


def check_extension_property(
    decide: Callable[[Behavior], Verdict],
    behaviors: Sequence[Behavior],
) -> List[Tuple[int, Verdict, Verdict]]:
    """Nondisturbing behaviors on which decide disagrees with decide_ks."""
    disagreements = []
    for index, b in enumerate(behaviors):
        if check_nondisturbance(b) is not None:
            continue
        ks = decide_ks(b)
        other = decide(b)
        if ks.value != other.value:
            disagreements.append((index, other, ks))
    return disagreements


# =============================================================================
# Uniqueness property
# =============================================================================

@dataclass(frozen=True, eq=False)
class UniquenessReport:
    criterion: str
    passed: bool
    coupling: Optional[Distribution]
    maxima: Tuple[Tuple[str, Fraction], ...] = ()
    counterexample: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "passed": self.passed,
            "coupling": self.coupling.to_json() if self.coupling else None,
            "maxima": {label: format_rational(v) for label, v in self.maxima},
            "counterexample": self.counterexample,
        }


def _event_probability(d: Distribution, event: Callable[[tuple], bool]) -> Fraction:
    return sum((w for t, w in d.weights.items() if event(t)), Fraction(0))


def verify_uniqueness_property(
    crit: CouplingCriterion,
    marginals: Sequence[Distribution],
    max_vars: Optional[int] = None,
) -> UniquenessReport:
    """
    Brute-force check that the criterion's coupling is the unique vertex of
    the coupling polytope maximizing every event the criterion names, and
    that identical marginals give the all-equal coupling.
    """
    try:
        joint = apply_criterion(crit, marginals)
    except CriterionError as e:
        return UniquenessReport(crit.name, False, None, counterexample=str(e))

    vertices = coupling_vertices(marginals, max_vars=max_vars)
    events = crit.maximized_events(len(marginals))
    maxima = tuple(
        (label, max(_event_probability(v, event) for v in vertices)) for label, event in events
    )

    def fail(message: str) -> UniquenessReport:
        logger.info(f"Uniqueness check failed for {crit.name}: {message}")
        return UniquenessReport(crit.name, False, joint, maxima, message)

    for (label, event), (_, best) in zip(events, maxima):
        value = _event_probability(joint, event)
        if value != best:
            return fail(
                f"event {label}: criterion gives {format_rational(value)}, "
                f"maximum over couplings is {format_rational(best)}"
            )

    optimal = [
        v for v in vertices
        if all(_event_probability(v, event) == best for (_, event), (_, best) in zip(events, maxima))
    ]
    if len(optimal) != 1:
        return fail(f"{len(optimal)} vertices satisfy the defining property")
    if optimal[0] != joint:
        return fail("criterion coupling is not the optimal vertex")

    first = marginals[0]
    if all(d.weights.keys() == first.weights.keys() and
           all(d.probability(k) == first.probability(k) for k in first.weights)
           for d in marginals):
        all_equal = Distribution(
            joint.variables,
            {(u,) * len(marginals): w for (u,), w in first.weights.items()},
        )
        if joint != all_equal:
            return fail("identical marginals but the coupling is not all-equal")

    return UniquenessReport(crit.name, True, joint, maxima)
