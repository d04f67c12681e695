"""
ContextLab Behavior Transforms

The three principle transforms (nesting, coarse-graining, post-processing)
and consistification with its inverse. Every transform is a pure function
from a behavior and a spec to a new behavior; probabilities stay exact.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .core import (
    Behavior,
    Context,
    Distribution,
    Observable,
    Outcome,
    Scenario,
    enumerate_joint_outcomes,
    marginalize,
)
from .deciders import (
    CouplingCriterion,
    MULTIMAXIMAL,
    apply_criterion,
    column_name,
    get_criterion,
    incidence_name,
    row_name,
)
from .errors import ConsistificationError, TransformError

logger = logging.getLogger(__name__)


# =============================================================================
# Nesting
# =============================================================================

@dataclass(frozen=True)
class NestSpec:
    """
    What survives a nesting. None keeps everything; incidences=None keeps
    every original (q, c) whose observable and context both survive.
    """
    observables: Optional[FrozenSet[str]] = None
    contexts: Optional[FrozenSet[str]] = None
    incidences: Optional[FrozenSet[Tuple[str, str]]] = None

    kind: ClassVar[str] = "nest"

    def __post_init__(self):
        for name in ("observables", "contexts", "incidences"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, frozenset(tuple(v) if isinstance(v, list) else v for v in value))

    @classmethod
    def drop_context(cls, scenario: Scenario, context: str) -> "NestSpec":
        return cls(contexts=frozenset(c for c in scenario.context_names if c != context))

    @classmethod
    def drop_observable(cls, scenario: Scenario, observable: str) -> "NestSpec":
        return cls(observables=frozenset(q for q in scenario.observable_names if q != observable))

    @classmethod
    def drop_incidence(cls, scenario: Scenario, observable: str, context: str) -> "NestSpec":
        kept = [inc for inc in scenario.incidences() if inc != (observable, context)]
        return cls(incidences=frozenset(kept))

    def resolve(self, scenario: Scenario) -> Tuple[set, set, set]:
        observables = set(scenario.observable_names if self.observables is None else self.observables)
        contexts = set(scenario.context_names if self.contexts is None else self.contexts)
        for q in observables - set(scenario.observable_names):
            raise TransformError(f"nest keeps unknown observable {q}")
        for c in contexts - set(scenario.context_names):
            raise TransformError(f"nest keeps unknown context {c}")

        allowed = {(q, c) for q, c in scenario.incidences() if q in observables and c in contexts}
        incidences = allowed if self.incidences is None else set(self.incidences)
        for q, c in sorted(incidences - allowed):
            raise TransformError(f"incidence {q}@{c} is not a kept measurement of the original")
        for c in scenario.contexts:
            if c.name in contexts and not any((q, c.name) in incidences for q in c.observables):
                raise TransformError(f"context {c.name} would keep no observable")
        return observables, contexts, incidences


def nest(b: Behavior, spec: NestSpec) -> Behavior:
    """Restrict to a sub-scenario; each kept context keeps the exact marginal."""
    scenario = b.scenario
    observables, contexts, incidences = spec.resolve(scenario)

    new_observables = tuple(q for q in scenario.observables if q.name in observables)
    new_contexts = []
    distributions = {}
    for c in scenario.contexts:
        if c.name not in contexts:
            continue
        kept = tuple(q for q in c.observables if (q, c.name) in incidences)
        new_contexts.append(Context(c.name, kept))
        distributions[c.name] = b.marginal(c.name, kept)
    return Behavior(Scenario(new_observables, tuple(new_contexts)), distributions)


# =============================================================================
# Coarse-graining
# =============================================================================

@dataclass(frozen=True)
class CoarseGrainSpec:
    """Outcome maps g_q per observable; unlisted observables are untouched."""
    maps: Mapping[str, Mapping[Outcome, Outcome]] = field(default_factory=dict)

    kind: ClassVar[str] = "coarse_grain"

    @classmethod
    def from_merges(
        cls,
        scenario: Scenario,
        merges: Mapping[str, Sequence[Sequence[Outcome]]],
    ) -> "CoarseGrainSpec":
        """Merge groups of outcomes; a merged label concatenates its sources."""
        maps = {}
        for q, groups in merges.items():
            outcomes = scenario.outcomes(q)
            mapping = {u: u for u in outcomes}
            for group in groups:
                members = [u for u in outcomes if u in group]
                if len(members) != len(group):
                    raise TransformError(f"merge group {list(group)} names outcomes {q} lacks")
                label = "".join(str(u) for u in members)
                for u in members:
                    mapping[u] = label
            maps[q] = mapping
        return cls(maps)

    def resolve(self, scenario: Scenario) -> Dict[str, Dict[Outcome, Outcome]]:
        resolved = {}
        for q in self.maps:
            if q not in scenario.observable_names:
                raise TransformError(f"coarse-graining names unknown observable {q}")
        for obs in scenario.observables:
            mapping = dict(self.maps.get(obs.name, {u: u for u in obs.outcomes}))
            missing = [u for u in obs.outcomes if u not in mapping]
            if missing:
                raise TransformError(f"coarse-graining of {obs.name} is not total: missing {missing}")
            extra = [u for u in mapping if u not in obs.outcomes]
            if extra:
                raise TransformError(f"coarse-graining of {obs.name} maps unknown outcomes {extra}")
            resolved[obs.name] = mapping
        return resolved


def _image(outcomes: Sequence[Outcome], mapping: Mapping[Outcome, Outcome]) -> Tuple[Outcome, ...]:
    image: List[Outcome] = []
    for u in outcomes:
        if mapping[u] not in image:
            image.append(mapping[u])
    return tuple(image)


def coarse_grain(b: Behavior, spec: CoarseGrainSpec) -> Behavior:
    """Push every context distribution forward through the outcome maps."""
    scenario = b.scenario
    maps = spec.resolve(scenario)
    observables = tuple(
        Observable(q.name, _image(q.outcomes, maps[q.name])) for q in scenario.observables
    )
    new_scenario = Scenario(observables, scenario.contexts)

    distributions = {}
    for c in scenario.contexts:
        weights: Dict[tuple, Fraction] = {}
        for key, w in b.distribution(c.name).weights.items():
            image = tuple(maps[q][u] for q, u in zip(c.observables, key))
            weights[image] = weights.get(image, Fraction(0)) + w
        distributions[c.name] = Distribution(new_scenario.context_variables(c.name), weights)
    return Behavior(new_scenario, distributions)


# =============================================================================
# Post-processing
# =============================================================================

def _product_table(source_outcomes: Sequence[Sequence[Outcome]]):
    values = []
    for outcomes in source_outcomes:
        try:
            parsed = {u: int(u) for u in outcomes}
        except (TypeError, ValueError):
            raise TransformError(f"product needs +1/-1 outcome labels, got {list(outcomes)}")
        if set(parsed.values()) - {-1, 1}:
            raise TransformError(f"product needs +1/-1 outcome labels, got {list(outcomes)}")
        values.append(parsed)
    table = {}
    for t in enumerate_joint_outcomes([(str(i), o) for i, o in enumerate(source_outcomes)]):
        v = 1
        for parsed, u in zip(values, t):
            v *= parsed[u]
        table[t] = f"{v:+d}"
    return table, ("-1", "+1")


def _parity_table(source_outcomes: Sequence[Sequence[Outcome]]):
    for outcomes in source_outcomes:
        if len(outcomes) > 2:
            raise TransformError(f"parity needs binary observables, got {list(outcomes)}")
    table = {}
    for t in enumerate_joint_outcomes([(str(i), o) for i, o in enumerate(source_outcomes)]):
        bits = sum(list(outcomes).index(u) for outcomes, u in zip(source_outcomes, t))
        table[t] = str(bits % 2)
    return table, ("0", "1")


NAMED_FUNCTIONS = {"product": _product_table, "parity": _parity_table}


@dataclass(frozen=True)
class PostProcessSpec:
    """
    New observable name = f(sources). f is either a named function
    (product, parity) or an explicit table over the sources' joint outcomes.
    """
    sources: Tuple[str, ...]
    name: str
    function: Optional[str] = None
    table: Optional[Mapping[tuple, Outcome]] = None
    outcomes: Optional[Tuple[Outcome, ...]] = None

    kind: ClassVar[str] = "post_process"

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        if self.outcomes is not None:
            object.__setattr__(self, "outcomes", tuple(self.outcomes))

    def resolve(self, scenario: Scenario) -> Tuple[Dict[tuple, Outcome], Tuple[Outcome, ...]]:
        if not self.sources:
            raise TransformError("post-processing needs at least one source observable")
        if len(set(self.sources)) != len(self.sources):
            raise TransformError(f"post-processing repeats a source: {list(self.sources)}")
        for q in self.sources:
            if q not in scenario.observable_names:
                raise TransformError(f"post-processing source {q} is not an observable")
        if self.name in scenario.observable_names:
            raise TransformError(f"post-processed name {self.name} is already an observable")
        if (self.function is None) == (self.table is None):
            raise TransformError("post-processing needs exactly one of function or table")

        source_outcomes = [scenario.outcomes(q) for q in self.sources]
        domain = enumerate_joint_outcomes(list(zip(self.sources, source_outcomes)))
        if self.function is not None:
            if self.function not in NAMED_FUNCTIONS:
                raise TransformError(f"unknown post-processing function {self.function}")
            table, default_outcomes = NAMED_FUNCTIONS[self.function](source_outcomes)
        else:
            table = {tuple(k): v for k, v in self.table.items()}
            default_outcomes = _image(domain, table) if all(t in table for t in domain) else ()

        missing = [t for t in domain if t not in table]
        if missing:
            raise TransformError(f"post-processing table is not total: missing {missing[0]}")
        extra = [t for t in table if t not in domain]
        if extra:
            raise TransformError(f"post-processing table has invalid key {extra[0]}")

        outcomes = self.outcomes if self.outcomes is not None else default_outcomes
        for t in domain:
            if table[t] not in outcomes:
                raise TransformError(f"f{t} = {table[t]} is not a declared outcome")
        return table, tuple(outcomes)


def post_process(b: Behavior, spec: PostProcessSpec) -> Behavior:
    """
    Append spec.name to every context measuring all sources, with value
    f(sources) on every tuple. Other contexts are untouched.
    """
    scenario = b.scenario
    table, outcomes = spec.resolve(scenario)
    targets = [c for c in scenario.contexts if all(q in c.observables for q in spec.sources)]
    if not targets:
        raise TransformError(
            f"sources {list(spec.sources)} are not jointly measured in any context"
        )
    target_names = {c.name for c in targets}

    observables = scenario.observables + (Observable(spec.name, outcomes),)
    contexts = tuple(
        Context(c.name, c.observables + (spec.name,)) if c.name in target_names else c
        for c in scenario.contexts
    )
    new_scenario = Scenario(observables, contexts)

    distributions = {}
    for c in scenario.contexts:
        d = b.distribution(c.name)
        if c.name not in target_names:
            distributions[c.name] = d
            continue
        indices = [c.observables.index(q) for q in spec.sources]
        weights = {
            key + (table[tuple(key[i] for i in indices)],): w for key, w in d.weights.items()
        }
        distributions[c.name] = Distribution(new_scenario.context_variables(c.name), weights)
    return Behavior(new_scenario, distributions)


# =============================================================================
# Consistification
# =============================================================================

@dataclass(frozen=True)
class ConsistifiedTag:
    """
    Provenance of a consistified behavior: which original incidence each
    observable copies, which original context or observable each context
    stands for, and the original scenario.
    """
    criterion: str
    observables: Tuple[Tuple[str, str, str], ...]   # (copy name, q, c)
    contexts: Tuple[Tuple[str, str, str], ...]      # (context name, "row"|"col", source)
    source: Scenario


@dataclass(frozen=True)
class ConsistifySpec:
    criterion: str = "multimaximal"

    kind: ClassVar[str] = "consistify"


@dataclass(frozen=True)
class DeconsistifySpec:
    kind: ClassVar[str] = "deconsistify"


def consistify(b: Behavior, crit: CouplingCriterion = MULTIMAXIMAL) -> Behavior:
    """
    Map b to a nondisturbing behavior over its incidence copies (q, c):
    row contexts carry P(.|c), column contexts the criterion's coupling of
    the copies of q. The result carries a ConsistifiedTag.
    """
    crit.domain.check(b)
    scenario = b.scenario

    incidences = scenario.incidences()
    observables = tuple(
        Observable(incidence_name(q, c), scenario.outcomes(q)) for q, c in incidences
    )
    contexts = []
    distributions = {}
    tag_contexts = []

    for c in scenario.contexts:
        name = row_name(c.name)
        members = tuple(incidence_name(q, c.name) for q in c.observables)
        contexts.append(Context(name, members))
        distributions[name] = b.distribution(c.name).renamed(members)
        tag_contexts.append((name, "row", c.name))

    for q in scenario.observable_names:
        name = column_name(q)
        copies = scenario.contexts_of(q)
        members = tuple(incidence_name(q, c) for c in copies)
        contexts.append(Context(name, members))
        if copies:
            marginals = [b.marginal(c, [q]).renamed([incidence_name(q, c)]) for c in copies]
            distributions[name] = apply_criterion(crit, marginals)
        else:
            distributions[name] = Distribution((), {(): Fraction(1)})
        tag_contexts.append((name, "col", q))

    tag = ConsistifiedTag(
        criterion=crit.name,
        observables=tuple((incidence_name(q, c), q, c) for q, c in incidences),
        contexts=tuple(tag_contexts),
        source=scenario,
    )
    logger.debug(
        f"Consistified {len(scenario.observables)} observables / {len(scenario.contexts)} contexts "
        f"into {len(observables)} / {len(contexts)}"
    )
    return Behavior(Scenario(observables, tuple(contexts)), distributions, provenance=tag)


def deconsistify(bt: Behavior) -> Behavior:
    """Recover the original behavior from the row contexts and the tag."""
    tag = bt.provenance
    if not isinstance(tag, ConsistifiedTag):
        raise ConsistificationError("behavior carries no consistification provenance")
    source = tag.source
    copies = {(q, c): name for name, q, c in tag.observables}
    rows = {src: name for name, kind, src in tag.contexts if kind == "row"}
    present = set(bt.scenario.context_names)

    distributions = {}
    for c in source.contexts:
        if c.name not in rows:
            raise ConsistificationError(f"provenance has no row context for {c.name}")
        name = rows[c.name]
        if name not in present:
            raise ConsistificationError(f"row context {name} is missing from the behavior")
        try:
            expected = tuple(copies[(q, c.name)] for q in c.observables)
        except KeyError as e:
            raise ConsistificationError(f"provenance has no copy for incidence {e.args[0]}")
        if bt.scenario.context(name).observables != expected:
            raise ConsistificationError(
                f"row context {name} lists {list(bt.scenario.context(name).observables)}, "
                f"provenance expects {list(expected)}"
            )
        d = bt.distribution(name)
        if tuple(o for _, o in d.variables) != tuple(source.outcomes(q) for q in c.observables):
            raise ConsistificationError(f"row context {name} changed outcome sets")
        distributions[c.name] = d.renamed(list(c.observables))
    return Behavior(source, distributions)


# =============================================================================
# Dispatch
# =============================================================================

TransformSpec = Union[NestSpec, CoarseGrainSpec, PostProcessSpec, ConsistifySpec, DeconsistifySpec]


def apply_transform(b: Behavior, spec: TransformSpec) -> Behavior:
    if isinstance(spec, NestSpec):
        return nest(b, spec)
    if isinstance(spec, CoarseGrainSpec):
        return coarse_grain(b, spec)
    if isinstance(spec, PostProcessSpec):
        return post_process(b, spec)
    if isinstance(spec, ConsistifySpec):
        return consistify(b, get_criterion(spec.criterion))
    if isinstance(spec, DeconsistifySpec):
        return deconsistify(b)
    raise TransformError(f"unsupported transform spec: {type(spec).__name__}")


def lift_to_consistified(spec: TransformSpec, bt: Behavior) -> Behavior:
    """
    The naive translation of a principle transform onto a consistified
    behavior: act on each copy exactly as the original acts on q.
    """
    tag = bt.provenance
    if not isinstance(tag, ConsistifiedTag):
        raise ConsistificationError("lifting needs a consistified behavior")
    source = tag.source
    copies = {(q, c): name for name, q, c in tag.observables}

    if isinstance(spec, CoarseGrainSpec):
        maps = {
            copies[(q, c)]: spec.maps[q] for (q, c) in copies if q in spec.maps
        }
        return coarse_grain(bt, CoarseGrainSpec(maps))

    if isinstance(spec, NestSpec):
        _, contexts, incidences = spec.resolve(source)
        kept = {copies[inc] for inc in incidences}
        kept_contexts = set()
        for name, kind, src in tag.contexts:
            members = bt.scenario.context(name).observables
            alive = src in contexts if kind == "row" else any(m in kept for m in members)
            if alive:
                kept_contexts.add(name)
        lifted_incidences = {
            (q, c) for q, c in bt.scenario.incidences() if q in kept and c in kept_contexts
        }
        return nest(bt, NestSpec(frozenset(kept), frozenset(kept_contexts), frozenset(lifted_incidences)))

    if isinstance(spec, PostProcessSpec):
        result = Behavior(bt.scenario, bt.distributions)
        applied = 0
        for c in source.contexts:
            if not all(q in c.observables for q in spec.sources):
                continue
            result = post_process(
                result,
                PostProcessSpec(
                    sources=tuple(copies[(q, c.name)] for q in spec.sources),
                    name=incidence_name(spec.name, c.name),
                    function=spec.function,
                    table=spec.table,
                    outcomes=spec.outcomes,
                ),
            )
            applied += 1
        if not applied:
            raise TransformError(f"sources {list(spec.sources)} are not jointly measured in any context")
        return result

    raise TransformError(f"no lift defined for {type(spec).__name__}")
