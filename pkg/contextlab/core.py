"""
ContextLab Core

Exact-rational data model for measurement scenarios and behaviors:
validation, marginalization and disturbance detection.

All probabilities are fractions.Fraction; nothing in this module rounds.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import DomainError, ScenarioError, UnknownVariableError

logger = logging.getLogger(__name__)

Outcome = Hashable
OutcomeTuple = Tuple[Outcome, ...]
Variables = Tuple[Tuple[str, Tuple[Outcome, ...]], ...]


# =============================================================================
# Formatting helpers (shared by every JSON surface)
# =============================================================================

def format_rational(value: Fraction) -> str:
    """Render a rational as "num/den", or "num" when integral."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_outcome_key(outcomes: Sequence[Outcome]) -> str:
    """Comma-joined outcome labels, the key format of behavior files."""
    return ",".join(str(u) for u in outcomes)


def _freeze_variables(variables: Iterable) -> Variables:
    return tuple((str(name), tuple(outcomes)) for name, outcomes in variables)


def enumerate_joint_outcomes(variables: Iterable) -> List[OutcomeTuple]:
    """
    All joint outcome tuples of the given variables.

    Lexicographic in declared outcome order, last variable fastest.
    An empty variable list has exactly one (nullary) outcome.
    """
    variables = _freeze_variables(variables)
    for name, outcomes in variables:
        if not outcomes:
            raise ScenarioError(f"variable {name} has an empty outcome list")
    return list(itertools.product(*(outcomes for _, outcomes in variables)))


# =============================================================================
# Scenario
# =============================================================================

@dataclass(frozen=True)
class Observable:
    name: str
    outcomes: Tuple[Outcome, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))


@dataclass(frozen=True)
class Context:
    name: str
    observables: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))


@dataclass(frozen=True)
class Scenario:
    """
    A measurement scenario: observables with finite outcome lists and named
    contexts listing the observables measured together.

    Observables and contexts keep declaration order everywhere.
    """
    observables: Tuple[Observable, ...]
    contexts: Tuple[Context, ...]

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "contexts", tuple(self.contexts))

        names = [q.name for q in self.observables]
        if len(set(names)) != len(names):
            raise ScenarioError(f"duplicate observable names: {_duplicates(names)}")
        for q in self.observables:
            if not q.outcomes:
                raise ScenarioError(f"observable {q.name} has no outcomes")
            if len(set(q.outcomes)) != len(q.outcomes):
                raise ScenarioError(f"observable {q.name} repeats an outcome label")

        context_names = [c.name for c in self.contexts]
        if len(set(context_names)) != len(context_names):
            raise ScenarioError(f"duplicate context names: {_duplicates(context_names)}")
        known = set(names)
        for c in self.contexts:
            if len(set(c.observables)) != len(c.observables):
                raise ScenarioError(f"context {c.name} lists an observable twice")
            for q in c.observables:
                if q not in known:
                    raise ScenarioError(f"context {c.name} uses unknown observable {q}")

    @classmethod
    def from_lists(cls, observables: Iterable, contexts: Iterable) -> "Scenario":
        """Build from [(name, outcomes)] and [(name, [observable names])]."""
        return cls(
            tuple(Observable(name, tuple(outcomes)) for name, outcomes in observables),
            tuple(Context(name, tuple(members)) for name, members in contexts),
        )

    @property
    def observable_names(self) -> List[str]:
        return [q.name for q in self.observables]

    @property
    def context_names(self) -> List[str]:
        return [c.name for c in self.contexts]

    def observable(self, name: str) -> Observable:
        for q in self.observables:
            if q.name == name:
                return q
        raise UnknownVariableError(name)

    def context(self, name: str) -> Context:
        for c in self.contexts:
            if c.name == name:
                return c
        raise DomainError(f"unknown context: {name}")

    def outcomes(self, name: str) -> Tuple[Outcome, ...]:
        return self.observable(name).outcomes

    def variables(self, names: Iterable[str]) -> Variables:
        return tuple((q, self.outcomes(q)) for q in names)

    def context_variables(self, name: str) -> Variables:
        return self.variables(self.context(name).observables)

    def incidences(self) -> List[Tuple[str, str]]:
        """All (observable, context) pairs with q measured in c, context-major."""
        return [(q, c.name) for c in self.contexts for q in c.observables]

    def contexts_of(self, name: str) -> List[str]:
        return [c.name for c in self.contexts if name in c.observables]

    def is_binary(self) -> bool:
        return all(len(q.outcomes) <= 2 for q in self.observables)


def _duplicates(names: Sequence[str]) -> List[str]:
    seen, dup = set(), []
    for n in names:
        if n in seen and n not in dup:
            dup.append(n)
        seen.add(n)
    return dup


# =============================================================================
# Distribution
# =============================================================================

@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Sparse exact distribution over named variables.

    Absent tuples carry probability zero; explicit zeros are dropped on
    construction so equality is structural.
    """
    variables: Variables
    weights: Mapping[OutcomeTuple, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", _freeze_variables(self.variables))
        weights: Dict[OutcomeTuple, Fraction] = {}
        for key, value in dict(self.weights).items():
            value = Fraction(value)
            if value != 0:
                weights[tuple(key)] = weights.get(tuple(key), Fraction(0)) + value
        object.__setattr__(self, "weights", {k: v for k, v in weights.items() if v != 0})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.variables == other.variables and dict(self.weights) == dict(other.weights)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def point_mass(cls, variables: Iterable, outcome: Sequence[Outcome]) -> "Distribution":
        return cls(tuple(variables), {tuple(outcome): Fraction(1)})

    @classmethod
    def uniform(cls, variables: Iterable) -> "Distribution":
        tuples = enumerate_joint_outcomes(variables)
        return cls(tuple(variables), {t: Fraction(1, len(tuples)) for t in tuples})

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.variables]

    def probability(self, outcome: Sequence[Outcome]) -> Fraction:
        return self.weights.get(tuple(outcome), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def sorted_items(self) -> List[Tuple[OutcomeTuple, Fraction]]:
        """Support in canonical (lexicographic, declared-order) order."""
        position = [
            {u: i for i, u in enumerate(outcomes)} for _, outcomes in self.variables
        ]

        def rank(item):
            key = item[0]
            return tuple(pos.get(u, len(pos)) for pos, u in zip(position, key))

        return sorted(self.weights.items(), key=rank)

    def dense(self) -> List[Fraction]:
        """Weights of every joint outcome in enumeration order."""
        return [self.probability(t) for t in enumerate_joint_outcomes(self.variables)]

    def renamed(self, names: Sequence[str]) -> "Distribution":
        """Same weights under new variable names (positional)."""
        if len(names) != len(self.variables):
            raise DomainError(f"expected {len(self.variables)} names, got {len(names)}")
        variables = tuple((new, outcomes) for new, (_, outcomes) in zip(names, self.variables))
        return Distribution(variables, dict(self.weights))

    def violations(self, label: str) -> List[str]:
        """Every invariant violation, each message prefixed with label."""
        problems = []
        width = len(self.variables)
        for key, value in self.weights.items():
            if len(key) != width:
                problems.append(
                    f"{label}: key {format_outcome_key(key)} has {len(key)} labels, expected {width}"
                )
                continue
            for (name, outcomes), u in zip(self.variables, key):
                if u not in outcomes:
                    problems.append(
                        f"{label}: invalid outcome {u} for {name} in {format_outcome_key(key)}"
                    )
            if value < 0:
                problems.append(
                    f"{label}: negative weight {format_rational(value)} at {format_outcome_key(key)}"
                )
        total = self.total()
        if total != 1:
            problems.append(f"{label} sums to {format_rational(total)}")
        return problems

    def to_json(self) -> dict:
        return {
            "variables": self.names,
            "weights": {format_outcome_key(k): format_rational(v) for k, v in self.sorted_items()},
        }


def marginalize(d: Distribution, subset: Sequence[str]) -> Distribution:
    """Exact marginal of d onto the named variables, in the order given."""
    subset = list(subset)
    names = d.names
    indices = []
    for name in subset:
        if name not in names:
            raise UnknownVariableError(name)
        if subset.count(name) > 1:
            raise DomainError(f"variable listed twice in marginal: {name}")
        indices.append(names.index(name))

    weights: Dict[OutcomeTuple, Fraction] = {}
    for key, value in d.weights.items():
        sub = tuple(key[i] for i in indices)
        weights[sub] = weights.get(sub, Fraction(0)) + value
    return Distribution(tuple(d.variables[i] for i in indices), weights)


# =============================================================================
# Behavior
# =============================================================================

@dataclass(frozen=True, eq=False)
class Behavior:
    """
    One joint distribution per context of a scenario.

    provenance is set only on consistified behaviors and lets deconsistify
    recover the original from the behavior alone.
    """
    scenario: Scenario
    distributions: Mapping[str, Distribution]
    provenance: Optional[Any] = None

    def __post_init__(self):
        object.__setattr__(self, "distributions", dict(self.distributions))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Behavior):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and dict(self.distributions) == dict(other.distributions)
            and self.provenance == other.provenance
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_tables(cls, scenario: Scenario, tables: Mapping[str, Mapping]) -> "Behavior":
        """Build from {context: {outcome tuple: weight}} using declared variable order."""
        return cls(
            scenario,
            {
                c.name: Distribution(scenario.context_variables(c.name), tables.get(c.name, {}))
                for c in scenario.contexts
            },
        )

    def distribution(self, context: str) -> Distribution:
        if context not in self.distributions:
            raise DomainError(f"no distribution for context {context}")
        return self.distributions[context]

    def marginal(self, context: str, subset: Sequence[str]) -> Distribution:
        return marginalize(self.distribution(context), subset)

    def is_binary(self) -> bool:
        return self.scenario.is_binary()


@dataclass(frozen=True, eq=False)
class DisturbanceWitness:
    """Two contexts whose marginals on their shared observables differ."""
    contexts: Tuple[str, str]
    shared: Tuple[str, ...]
    first: Distribution
    second: Distribution

    def to_json(self) -> dict:
        return {
            "contexts": list(self.contexts),
            "shared": list(self.shared),
            "marginals": [self.first.to_json(), self.second.to_json()],
        }


def check_nondisturbance(b: Behavior) -> Optional[DisturbanceWitness]:
    """
    None when b is nondisturbing, else the first offending context pair.

    Only the full shared observable set is compared; agreement there implies
    agreement on every subset.
    """
    contexts = b.scenario.contexts
    for i, first in enumerate(contexts):
        for second in contexts[i + 1:]:
            shared = tuple(q for q in first.observables if q in second.observables)
            if not shared:
                continue
            left = b.marginal(first.name, shared)
            right = b.marginal(second.name, shared)
            if left != right:
                logger.debug(f"Disturbance between {first.name} and {second.name} on {shared}")
                return DisturbanceWitness((first.name, second.name), shared, left, right)
    return None


def is_nondisturbing(b: Behavior) -> bool:
    return check_nondisturbance(b) is None


def validate_behavior(b: Behavior) -> List[str]:
    """Every Behavior invariant violation, each naming its context. Empty = valid."""
    problems = []
    scenario = b.scenario
    for c in scenario.contexts:
        if c.name not in b.distributions:
            problems.append(f"context {c.name} has no distribution")
            continue
        d = b.distributions[c.name]
        expected = scenario.context_variables(c.name)
        if d.variables != expected:
            problems.append(
                f"context {c.name}: variables {d.names} do not match declared {list(c.observables)}"
            )
            continue
        problems.extend(d.violations(f"context {c.name}"))
    for name in b.distributions:
        if name not in scenario.context_names:
            problems.append(f"distribution given for unknown context {name}")
    return problems
