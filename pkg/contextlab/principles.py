"""
ContextLab Principles

Monotonicity principle checks (nestedness, coarse-graining,
post-processing), the three consistification properties, seeded random
behaviors and the counterexample search.

A principle is violated by a transform A exactly when T(b) = 0 and
T(A(b)) = 1; contextual -> noncontextual is always allowed.
"""
import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .config import (
    PRINCIPLE_FAMILIES,
    get_family_for_principle,
    get_principle_for_family,
    settings,
)
from .core import (
    Behavior,
    Distribution,
    Scenario,
    check_nondisturbance,
    enumerate_joint_outcomes,
    marginalize,
)
from .deciders import (
    MULTIMAXIMAL,
    CouplingCriterion,
    Verdict,
    decide_c,
    decide_ks,
    domain_of,
    get_decider,
    verify_verdict,
)
from .errors import (
    ContextlabError,
    DomainError,
    FalsifierError,
    FormatError,
    SizeLimitError,
    TransformError,
)
from .models import (
    SearchConfigModel,
    behavior_from_json,
    behavior_to_json,
    parse_outcome_key,
    parse_rational,
    scenario_from_shape,
    spec_from_json,
    spec_to_json,
)
from .transforms import (
    CoarseGrainSpec,
    NestSpec,
    PostProcessSpec,
    TransformSpec,
    apply_transform,
    consistify,
    deconsistify,
    lift_to_consistified,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Principle reports
# =============================================================================

@dataclass(frozen=True, eq=False)
class PrincipleReport:
    """Both verdicts of one (behavior, transform) pair, with full evidence."""
    principle: str
    theory: str
    behavior_id: str
    behavior: Behavior
    spec: TransformSpec
    transformed: Behavior
    before: Verdict
    after: Verdict

    @property
    def status(self) -> str:
        if not self.before.contextual and self.after.contextual:
            return "violated"
        return "respected"

    @property
    def violated(self) -> bool:
        return self.status == "violated"

    def to_json(self) -> dict:
        return {
            "principle": self.principle,
            "theory": self.theory,
            "behavior_id": self.behavior_id,
            "status": self.status,
            "behavior": behavior_to_json(self.behavior),
            "spec": spec_to_json(self.spec, self.behavior.scenario),
            "before": self.before.to_json(),
            "after": self.after.to_json(),
        }


def check_principle(
    theory: str,
    b: Behavior,
    spec: TransformSpec,
    behavior_id: str = "input",
    principle: Optional[str] = None,
    max_vars: Optional[int] = None,
    before: Optional[Verdict] = None,
) -> PrincipleReport:
    """
    Decide b and spec(b) under theory and classify the pair. A verdict
    already computed for b under theory can be passed as before.

    Errors raised on the way are tagged with the stage they came from:
    "before", "transform" or "after".
    """
    kind = getattr(spec, "kind", None)
    try:
        implied = get_principle_for_family(kind)
    except ValueError:
        raise FormatError(f"transform kind {kind} does not belong to a monotonicity principle")
    if principle is not None and principle != implied:
        raise FormatError(f"principle {principle} expects a {get_family_for_principle(principle)} spec, got {kind}")

    decide = get_decider(theory, max_vars=max_vars)
    if before is None:
        try:
            before = decide(b)
        except ContextlabError as e:
            raise e.at_stage("before")
    elif before.theory != theory:
        raise FormatError(f"precomputed verdict is for {before.theory}, not {theory}")
    try:
        transformed = apply_transform(b, spec)
    except ContextlabError as e:
        raise e.at_stage("transform")
    try:
        after = decide(transformed)
    except ContextlabError as e:
        raise e.at_stage("after")

    report = PrincipleReport(implied, theory, behavior_id, b, spec, transformed, before, after)
    logger.debug(f"{implied} on {behavior_id} under {theory}: {before.label} -> {after.label}")
    return report


def recorded_evidence_problems(recorded: dict, fresh: Verdict) -> List[str]:
    """
    Check the evidence stored in a serialized verdict against the LP rebuilt
    from the behavior. Any valid witness or certificate is accepted, not
    only the one the solver would pick today. Missing evidence is a problem.
    """
    if fresh.disturbance is not None:
        if recorded.get("disturbance") != fresh.disturbance.to_json():
            return ["recorded disturbance differs from the re-run"]
        return []

    try:
        if fresh.contextual:
            if "certificate" not in recorded:
                return ["contextual verdict records no certificate"]
            if recorded.get("constraints") != list(fresh.problem.labels):
                return ["recorded certificate rows do not match the rebuilt LP"]
            certificate = tuple(parse_rational(y) for y in recorded["certificate"])
            candidate = replace(fresh, certificate=certificate)
        else:
            if "witness" not in recorded:
                return ["noncontextual verdict records no witness"]
            witness = recorded["witness"]
            names = [name for name, _ in fresh.variables]
            if witness.get("variables") != names:
                return ["recorded witness is over different variables"]
            weights = {parse_outcome_key(k): parse_rational(v) for k, v in witness["weights"].items()}
            distribution = Distribution(fresh.variables, weights)
            shape = distribution.violations("witness")
            if shape:
                return shape
            candidate = replace(fresh, witness=distribution)
    except (ContextlabError, AttributeError, TypeError) as e:
        return [f"recorded evidence is malformed: {e}"]
    return [f"recorded {p}" for p in verify_verdict(candidate)]


def reverify_report(data: dict, max_vars: Optional[int] = None) -> List[str]:
    """
    Re-run a serialized report end to end from its JSON alone: rebuild the
    behavior and spec, re-apply the transform, re-solve both LPs, re-check
    the evidence and compare with what was recorded. Empty list = confirmed.
    """
    problems = []
    try:
        b = behavior_from_json(data["behavior"])
        spec = spec_from_json(data["spec"], b.scenario)
        fresh = check_principle(data["theory"], b, spec, data.get("behavior_id", "input"), max_vars=max_vars)
    except KeyError as e:
        return [f"report is missing field {e.args[0]}"]
    except ContextlabError as e:
        return [f"report no longer evaluates: {e}"]

    for label, verdict in (("before", fresh.before), ("after", fresh.after)):
        for problem in verify_verdict(verdict):
            problems.append(f"{label}: {problem}")
        recorded = data.get(label)
        if not isinstance(recorded, dict) or recorded.get("verdict") != verdict.label:
            problems.append(f"{label}: recorded verdict differs from the re-run ({verdict.label})")
            continue
        problems.extend(f"{label}: {p}" for p in recorded_evidence_problems(recorded, verdict))
    if fresh.principle != data.get("principle"):
        problems.append(f"recorded principle {data.get('principle')} does not match spec kind")
    if fresh.status != data.get("status"):
        problems.append(f"recorded status {data.get('status')}, re-run gives {fresh.status}")
    return problems


# =============================================================================
# Consistification properties
# =============================================================================

@dataclass(frozen=True, eq=False)
class ConsistificationReport:
    """The three properties of the consistification map on one behavior."""
    criterion: str
    round_trip: bool
    nondisturbing: bool
    verdicts_agree: bool
    ks_verdict: Optional[Verdict]
    c_verdict: Optional[Verdict]
    problems: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.round_trip and self.nondisturbing and self.verdicts_agree and not self.problems

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "ok": self.ok,
            "round_trip": self.round_trip,
            "nondisturbing": self.nondisturbing,
            "verdicts_agree": self.verdicts_agree,
            "ks_of_consistified": self.ks_verdict.to_json() if self.ks_verdict else None,
            "c_of_original": self.c_verdict.to_json() if self.c_verdict else None,
            "problems": list(self.problems),
        }


def verify_consistification_properties(
    b: Behavior,
    crit: CouplingCriterion = MULTIMAXIMAL,
    max_vars: Optional[int] = None,
) -> ConsistificationReport:
    """
    Check injectivity (deconsistify(consistify(b)) == b), nondisturbance of
    consistify(b), and decide_ks(consistify(b)) == decide_c(b). Failures are
    reported, never raised; a failure falsifies the construction.
    """
    crit.domain.check(b)
    problems = []
    bt = consistify(b, crit)

    try:
        recovered = deconsistify(bt)
        round_trip = recovered.scenario == b.scenario and recovered.distributions == b.distributions
    except ContextlabError as e:
        problems.append(f"deconsistify failed: {e}")
        round_trip = False

    witness = check_nondisturbance(bt)
    nondisturbing = witness is None
    if witness is not None:
        problems.append(f"consistified behavior disturbs between {witness.contexts[0]} and {witness.contexts[1]}")

    ks_verdict = c_verdict = None
    verdicts_agree = False
    if nondisturbing:
        ks_verdict = decide_ks(bt, max_vars=max_vars)
        c_verdict = decide_c(b, crit, max_vars=max_vars)
        verdicts_agree = ks_verdict.value == c_verdict.value
        for label, verdict in (("ks", ks_verdict), ("c", c_verdict)):
            problems.extend(f"{label}: {p}" for p in verify_verdict(verdict))

    report = ConsistificationReport(
        crit.name, round_trip, nondisturbing, verdicts_agree, ks_verdict, c_verdict, tuple(problems)
    )
    if not report.ok:
        logger.error(f"Consistification property failed: {report.problems}")
    return report


@dataclass(frozen=True, eq=False)
class CommutationReport:
    """consistify(A(b)) against the lifted A applied to consistify(b)."""
    spec: TransformSpec
    equal: bool
    direct: Behavior
    lifted: Behavior

    def to_json(self) -> dict:
        def shape(x: Behavior) -> dict:
            return {
                "observables": len(x.scenario.observables),
                "contexts": len(x.scenario.contexts),
            }

        return {
            "spec": spec_to_json(self.spec),
            "commutes": self.equal,
            "consistify_then_transform": shape(self.lifted),
            "transform_then_consistify": shape(self.direct),
        }


def commutation_report(
    b: Behavior,
    spec: TransformSpec,
    crit: CouplingCriterion = MULTIMAXIMAL,
) -> CommutationReport:
    direct = consistify(apply_transform(b, spec), crit)
    lifted = lift_to_consistified(spec, consistify(b, crit))
    equal = direct.scenario == lifted.scenario and direct.distributions == lifted.distributions
    return CommutationReport(spec, equal, direct, lifted)


# =============================================================================
# Scenario shapes and random behaviors
# =============================================================================

PLUS_MINUS = ("-1", "+1")


def cycle_scenario(n: int) -> Scenario:
    """n binary observables on a ring: contexts {q_i, q_i+1}."""
    observables = [(f"q{i}", PLUS_MINUS) for i in range(1, n + 1)]
    contexts = [
        (f"c{i}{i % n + 1}", (f"q{i}", f"q{i % n + 1}"))
        for i in range(1, n + 1)
    ]
    return Scenario.from_lists(observables, contexts)


SHAPES: Dict[str, Scenario] = {
    "cycle4": cycle_scenario(4),
    "prbox": cycle_scenario(4),
    "triangle": cycle_scenario(3),
    "pair2": Scenario.from_lists(
        [("q1", PLUS_MINUS), ("q2", PLUS_MINUS)],
        [("c1", ("q1", "q2")), ("c2", ("q1", "q2"))],
    ),
}


@dataclass(frozen=True)
class SearchConfig:
    """Everything that determines a search, and hence its output."""
    scenario: Scenario
    shape: str = "custom"
    theory: str = "cbd2"
    families: Tuple[str, ...] = tuple(PRINCIPLE_FAMILIES)
    conditioning: str = "disturbing"
    denominator: int = field(default_factory=lambda: settings.DEFAULT_DENOMINATOR)
    budget: int = 100
    seed: int = 0
    perturb: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.budget < 1:
            raise FormatError("search budget must be at least 1")
        if self.denominator < 1:
            raise FormatError("denominator bound must be at least 1")
        size = 1
        for obs in self.scenario.observables:
            size *= len(obs.outcomes)
        if size > settings.MAX_LP_VARS:
            raise SizeLimitError(f"shape needs {size} global outcomes, limit is {settings.MAX_LP_VARS}")
        if len(self.scenario.incidences()) > settings.MAX_INCIDENCES:
            raise SizeLimitError(
                f"shape has {len(self.scenario.incidences())} incidences, limit is {settings.MAX_INCIDENCES}"
            )

    @classmethod
    def from_model(cls, model: SearchConfigModel) -> "SearchConfig":
        """Build from a config file; CONTEXTLAB_SEED overrides the file's seed."""
        if isinstance(model.shape, str):
            if model.shape not in SHAPES:
                raise FormatError(f"unknown shape preset {model.shape}; known: {sorted(SHAPES)}")
            scenario, shape = SHAPES[model.shape], model.shape
        else:
            scenario, shape = scenario_from_shape(model.shape), "custom"
        seed = settings.SEED if settings.SEED is not None else model.seed
        return cls(
            scenario=scenario,
            shape=shape,
            theory=model.theory,
            families=tuple(model.families),
            conditioning=model.conditioning,
            denominator=model.denominator or settings.DEFAULT_DENOMINATOR,
            budget=model.budget,
            seed=seed,
            perturb=model.perturb,
            workers=model.workers or settings.SEARCH_WORKERS,
        )

    @property
    def expects_violation(self) -> bool:
        """Only C contextuality on disturbing inputs is expected to break a principle."""
        return self.theory == "cbd2" and self.conditioning != "nondisturbing"


def _random_weights(rng: random.Random, size: int, denominator: int) -> List[Fraction]:
    counts = [0] * size
    for _ in range(denominator):
        counts[rng.randrange(size)] += 1
    return [Fraction(c, denominator) for c in counts]


def _random_distribution(rng: random.Random, variables, denominator: int) -> Distribution:
    tuples = enumerate_joint_outcomes(variables)
    return Distribution(variables, dict(zip(tuples, _random_weights(rng, len(tuples), denominator))))


def _resample_pair(rng: random.Random, d: Distribution, denominator: int) -> Distribution:
    """Same one-variable marginals, new correlation on a 1/D grid."""
    (a, outcomes_a), (b, outcomes_b) = d.variables
    neg_a, pos_a = outcomes_a
    neg_b, pos_b = outcomes_b
    p = marginalize(d, [a]).probability((pos_a,))
    q = marginalize(d, [b]).probability((pos_b,))
    grid = lcm(denominator, p.denominator, q.denominator)
    low, high = max(Fraction(0), p + q - 1), min(p, q)
    choices = [Fraction(k, grid) for k in range(grid + 1) if low <= Fraction(k, grid) <= high]
    t = rng.choice(choices)
    return Distribution(d.variables, {
        (pos_a, pos_b): t,
        (pos_a, neg_b): p - t,
        (neg_a, pos_b): q - t,
        (neg_a, neg_b): 1 - p - q + t,
    })


def _is_pairwise_binary(scenario: Scenario) -> bool:
    """Binary pairs only, and no two contexts share both of their observables."""
    shapes = [frozenset(c.observables) for c in scenario.contexts]
    return len(set(shapes)) == len(shapes) and all(
        len(c.observables) == 2 and all(len(scenario.outcomes(q)) == 2 for q in c.observables)
        for c in scenario.contexts
    )


def _nondisturbing_behavior(rng: random.Random, scenario: Scenario, denominator: int) -> Behavior:
    variables = scenario.variables(scenario.observable_names)
    global_d = _random_distribution(rng, variables, denominator)
    distributions = {c.name: marginalize(global_d, c.observables) for c in scenario.contexts}
    if _is_pairwise_binary(scenario):
        # Fresh pair correlations keep every one-variable marginal, so the
        # result stays nondisturbing but can leave the KS polytope.
        distributions = {
            name: _resample_pair(rng, d, denominator) for name, d in distributions.items()
        }
    return Behavior(scenario, distributions)


def _free_behavior(rng: random.Random, scenario: Scenario, denominator: int) -> Behavior:
    return Behavior(scenario, {
        c.name: _random_distribution(rng, scenario.context_variables(c.name), denominator)
        for c in scenario.contexts
    })


def random_behavior(cfg: SearchConfig, index: int = 0) -> Behavior:
    """
    The index-th behavior of a seeded stream. Entries are multiples of
    1/denominator (or of a small common multiple for resampled pairs).
    """
    rng = random.Random(f"{cfg.seed}:{index}")
    if cfg.conditioning == "nondisturbing":
        return _nondisturbing_behavior(rng, cfg.scenario, cfg.denominator)
    if cfg.conditioning == "any":
        return _free_behavior(rng, cfg.scenario, cfg.denominator)
    if cfg.conditioning != "disturbing":
        raise FormatError(f"unknown conditioning {cfg.conditioning}")
    for _ in range(cfg.budget):
        b = _free_behavior(rng, cfg.scenario, cfg.denominator)
        if check_nondisturbance(b) is not None:
            return b
    raise DomainError(f"no disturbing behavior in {cfg.budget} draws for shape {cfg.shape}")


def perturb_behavior(b: Behavior, rng: random.Random, denominator: Optional[int] = None) -> Behavior:
    """
    Inject disturbance into one shared marginal: in one context, move up to
    1/denominator of mass between tuples differing only in one shared
    observable. Returns b unchanged when nothing is shared or no mass moves.
    """
    if denominator is None:
        denominator = settings.DEFAULT_DENOMINATOR
    scenario = b.scenario
    candidates = [
        (c, q)
        for c in scenario.contexts
        for q in c.observables
        if len(scenario.contexts_of(q)) > 1 and len(scenario.outcomes(q)) > 1
    ]
    if not candidates:
        return b
    context, q = rng.choice(candidates)
    d = b.distribution(context.name)
    position = context.observables.index(q)
    outcomes = scenario.outcomes(q)

    support = [t for t, _ in d.sorted_items()]
    if not support:
        return b
    source = rng.choice(support)
    target_outcome = rng.choice([u for u in outcomes if u != source[position]])
    target = source[:position] + (target_outcome,) + source[position + 1:]
    delta = min(d.probability(source), Fraction(1, denominator))

    weights = dict(d.weights)
    weights[source] -= delta
    weights[target] = weights.get(target, Fraction(0)) + delta
    distributions = dict(b.distributions)
    distributions[context.name] = Distribution(d.variables, weights)
    return Behavior(scenario, distributions)


# =============================================================================
# Transform catalogs
# =============================================================================

def _is_plus_minus(outcomes: Sequence[str]) -> bool:
    return set(outcomes) == set(PLUS_MINUS)


def transform_catalog(
    scenario: Scenario,
    families: Sequence[str] = tuple(PRINCIPLE_FAMILIES),
) -> List[Tuple[str, TransformSpec]]:
    """
    The finite transform catalogs, as (principle, spec) pairs in a fixed order:
    single-incidence and single-context drops, pairwise outcome merges, and
    product/parity of jointly measured pairs.
    """
    catalog: List[Tuple[str, TransformSpec]] = []
    for family in families:
        get_family_for_principle(family)

    if "nestedness" in families:
        for q, c in scenario.incidences():
            if len(scenario.context(c).observables) > 1:
                catalog.append(("nestedness", NestSpec.drop_incidence(scenario, q, c)))
        if len(scenario.contexts) > 1:
            for c in scenario.context_names:
                catalog.append(("nestedness", NestSpec.drop_context(scenario, c)))

    if "coarse-graining" in families:
        for obs in scenario.observables:
            for i, u in enumerate(obs.outcomes):
                for v in obs.outcomes[i + 1:]:
                    catalog.append(
                        ("coarse-graining", CoarseGrainSpec.from_merges(scenario, {obs.name: [[u, v]]}))
                    )

    if "post-processing" in families:
        names = scenario.observable_names
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                if not any(a in c.observables and b in c.observables for c in scenario.contexts):
                    continue
                outcomes = (scenario.outcomes(a), scenario.outcomes(b))
                if all(_is_plus_minus(o) for o in outcomes) and f"{a}*{b}" not in names:
                    catalog.append(
                        ("post-processing", PostProcessSpec((a, b), f"{a}*{b}", function="product"))
                    )
                if all(len(o) <= 2 for o in outcomes) and f"{a}^{b}" not in names:
                    catalog.append(
                        ("post-processing", PostProcessSpec((a, b), f"{a}^{b}", function="parity"))
                    )

    logger.debug(f"Transform catalog for {len(scenario.observables)} observables: {len(catalog)} specs")
    return catalog


# =============================================================================
# Search
# =============================================================================

@dataclass
class CandidateResult:
    index: int
    examined: bool = False
    checked: int = 0
    skipped: int = 0
    violations: List[dict] = field(default_factory=list)


def _candidate(cfg: SearchConfig, index: int) -> Behavior:
    if cfg.perturb and cfg.conditioning != "nondisturbing" and index % 2 == 1:
        # Boundary candidates: a nondisturbing sample nudged off the
        # nondisturbing face.
        rng = random.Random(f"{cfg.seed}:{index}:perturb")
        base = _nondisturbing_behavior(rng, cfg.scenario, cfg.denominator)
        return perturb_behavior(base, rng, cfg.denominator)
    return random_behavior(cfg, index)


def examine_candidate(cfg: SearchConfig, index: int) -> CandidateResult:
    """Decide one candidate, run the catalog on it and keep re-verified violations."""
    result = CandidateResult(index)
    b = _candidate(cfg, index)
    disturbance = check_nondisturbance(b)
    if cfg.conditioning == "disturbing" and disturbance is None:
        return result
    if cfg.theory == "ks" and disturbance is not None:
        return result
    if not domain_of(cfg.theory).contains(b):
        return result

    decide = get_decider(cfg.theory)
    before = decide(b)
    result.examined = True

    if cfg.theory != "ks" and disturbance is None:
        ks = decide_ks(b)
        if ks.value != before.value:
            raise FalsifierError(
                f"candidate {index}: {cfg.theory} says {before.label}, ks says {ks.label} "
                f"on a nondisturbing behavior"
            )

    if before.contextual:
        return result

    behavior_id = f"{cfg.shape}:{cfg.seed}:{index}"
    for principle, spec in transform_catalog(cfg.scenario, cfg.families):
        try:
            report = check_principle(cfg.theory, b, spec, behavior_id, principle=principle, before=before)
        except (TransformError, DomainError) as e:
            logger.debug(f"Skipped {spec.kind} on candidate {index}: {e}")
            result.skipped += 1
            continue
        result.checked += 1
        if not report.violated:
            continue
        data = report.to_json()
        problems = reverify_report(data)
        if problems:
            raise FalsifierError(f"candidate {index}: violation failed re-verification: {problems}")
        logger.info(f"Violation of {principle} on {behavior_id} by {spec.kind}")
        result.violations.append(data)
    return result


@dataclass(frozen=True)
class SearchResult:
    config: SearchConfig
    violations: Tuple[dict, ...]
    candidates: int
    examined: int
    checked: int
    skipped: int

    @property
    def exhausted(self) -> bool:
        """Budget spent without the violation the theory is expected to have."""
        return self.config.expects_violation and not self.violations

    def summary(self) -> dict:
        return {
            "shape": self.config.shape,
            "theory": self.config.theory,
            "families": list(self.config.families),
            "conditioning": self.config.conditioning,
            "seed": self.config.seed,
            "budget": self.config.budget,
            "candidates": self.candidates,
            "examined": self.examined,
            "transforms_checked": self.checked,
            "transforms_skipped": self.skipped,
            "violations": len(self.violations),
            "expects_violation": self.config.expects_violation,
            "exhausted": self.exhausted,
        }

    def to_json_lines(self, **extra) -> str:
        """One line per violation, then one summary line."""
        lines = [json.dumps(v, ensure_ascii=False) for v in self.violations]
        lines.append(json.dumps({"summary": {**self.summary(), **extra}}, ensure_ascii=False))
        return "\n".join(lines) + "\n"


def search_counterexamples(cfg: SearchConfig) -> SearchResult:
    """
    Seeded search for principle violations. Candidates are independent and
    results are merged by candidate index, so workers never change output.
    """
    indices = range(cfg.budget)
    logger.info(
        f"Searching {cfg.budget} {cfg.conditioning} candidates on {cfg.shape} under {cfg.theory} "
        f"(families: {', '.join(cfg.families)}, workers: {cfg.workers})"
    )
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(examine_candidate, [cfg] * cfg.budget, indices))
    else:
        results = [examine_candidate(cfg, i) for i in indices]
    results.sort(key=lambda r: r.index)

    violations = tuple(v for r in results for v in r.violations)
    search = SearchResult(
        cfg,
        violations,
        candidates=cfg.budget,
        examined=sum(r.examined for r in results),
        checked=sum(r.checked for r in results),
        skipped=sum(r.skipped for r in results),
    )
    if search.exhausted:
        logger.warning(f"Search exhausted {cfg.budget} candidates without a violation")
    else:
        logger.info(f"Search finished: {len(violations)} violations")
    return search
