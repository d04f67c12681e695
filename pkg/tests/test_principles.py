import copy
import random

import pytest

from contextlab.config import settings
from contextlab.core import Scenario, check_nondisturbance, is_nondisturbing, validate_behavior
from contextlab.deciders import check_extension_property, decide_ks, get_decider, verify_verdict
from contextlab.errors import DisturbingBehaviorError, DomainError, FormatError
from contextlab.models import SearchConfigModel, behavior_from_json, spec_from_json
from contextlab.principles import (
    SHAPES,
    SearchConfig,
    check_principle,
    perturb_behavior,
    random_behavior,
    reverify_report,
    search_counterexamples,
    transform_catalog,
    verify_consistification_properties,
)
from contextlab.transforms import CoarseGrainSpec, NestSpec


def config(shape="cycle4", **kwargs) -> SearchConfig:
    return SearchConfig(scenario=SHAPES[shape], shape=shape, **kwargs)


# =============================================================================
# Principle checks
# =============================================================================

def test_dropping_a_context_of_the_prbox(prbox):
    report = check_principle("ks", prbox, NestSpec.drop_context(prbox.scenario, "c14"))
    assert report.principle == "nestedness"
    assert report.before.contextual and not report.after.contextual
    assert report.status == "respected"


def test_constant_coarse_grain_of_correlated_cycle(cycle4_correlated):
    spec = CoarseGrainSpec.from_merges(cycle4_correlated.scenario, {"q1": [["-1", "+1"]]})
    report = check_principle("ks", cycle4_correlated, spec)
    assert report.principle == "coarse-graining"
    assert not report.before.contextual and not report.after.contextual
    assert report.status == "respected"


def test_domain_errors_carry_stage(disturbing1):
    with pytest.raises(DisturbingBehaviorError) as info:
        check_principle("ks", disturbing1, NestSpec.drop_context(disturbing1.scenario, "c14"))
    assert info.value.stage == "before"
    assert str(info.value).startswith("before: ")


def test_principle_must_match_spec(prbox):
    with pytest.raises(FormatError):
        check_principle("ks", prbox, NestSpec.drop_context(prbox.scenario, "c14"), principle="post-processing")


def test_precomputed_before_verdict_is_reused(prbox):
    before = decide_ks(prbox)
    report = check_principle("ks", prbox, NestSpec.drop_context(prbox.scenario, "c14"), before=before)
    assert report.before is before
    assert report.status == "respected"
    with pytest.raises(FormatError):
        check_principle("cbd2", prbox, NestSpec.drop_context(prbox.scenario, "c14"), before=before)


def test_report_json_reverifies(prbox):
    report = check_principle("cbd2", prbox, NestSpec.drop_context(prbox.scenario, "c14"))
    data = report.to_json()
    assert data["spec"] == {"kind": "nest", "contexts": ["c12", "c23", "c34"]}
    assert reverify_report(data) == []


def test_tampered_report_is_caught(prbox):
    data = check_principle("ks", prbox, NestSpec.drop_context(prbox.scenario, "c14")).to_json()
    tampered = copy.deepcopy(data)
    tampered["status"] = "violated"
    tampered["after"]["verdict"] = "contextual"
    assert reverify_report(tampered)


# =============================================================================
# Frozen cbd2 violation
# =============================================================================

def test_frozen_post_processing_violation_reverifies(frozen_violation):
    assert reverify_report(frozen_violation) == []


def test_frozen_violation_records_its_evidence(frozen_violation):
    assert len(frozen_violation["before"]["witness"]["weights"]) == 4
    assert len(frozen_violation["after"]["certificate"]) == len(frozen_violation["after"]["constraints"]) == 29


def test_tampered_certificate_is_caught(frozen_violation):
    tampered = copy.deepcopy(frozen_violation)
    tampered["after"]["certificate"][0] = "0"
    assert reverify_report(tampered) == ["after: recorded Farkas certificate fails re-check"]


def test_missing_certificate_is_caught(frozen_violation):
    tampered = copy.deepcopy(frozen_violation)
    del tampered["after"]["certificate"]
    assert reverify_report(tampered) == ["after: contextual verdict records no certificate"]


def test_tampered_witness_is_caught(frozen_violation):
    tampered = copy.deepcopy(frozen_violation)
    weights = tampered["before"]["witness"]["weights"]
    weights["+1,+1,+1,+1"] = weights.pop("+1,-1,+1,+1")
    problems = reverify_report(tampered)
    assert problems
    assert all(p.startswith("before: recorded witness") for p in problems)

    del tampered["before"]["witness"]
    assert reverify_report(tampered) == ["before: noncontextual verdict records no witness"]


def test_unnormalized_witness_is_caught(frozen_violation):
    tampered = copy.deepcopy(frozen_violation)
    tampered["before"]["witness"]["weights"]["-1,-1,-1,-1"] = "1/2"
    assert reverify_report(tampered) == ["before: witness sums to 5/4"]


def test_frozen_violation_is_disturbing_and_binary(frozen_violation):
    b = behavior_from_json(frozen_violation["behavior"])
    assert check_nondisturbance(b) is not None
    assert b.is_binary()


def test_frozen_violation_end_to_end(frozen_violation):
    b = behavior_from_json(frozen_violation["behavior"])
    spec = spec_from_json(frozen_violation["spec"], b.scenario)
    report = check_principle("cbd2", b, spec)
    assert report.violated
    assert report.before.witness is not None
    assert report.after.certificate is not None
    assert reverify_report(report.to_json()) == []


def test_same_transform_respected_under_strict(frozen_violation):
    b = behavior_from_json(frozen_violation["behavior"])
    spec = spec_from_json(frozen_violation["spec"], b.scenario)
    assert check_principle("strict", b, spec).status == "respected"


# =============================================================================
# Consistification properties
# =============================================================================

def test_consistification_properties_on_fixtures(prbox, maximally_disturbing, disturbing1):
    for b in (prbox, maximally_disturbing, disturbing1):
        report = verify_consistification_properties(b)
        assert report.ok, report.problems
    assert verify_consistification_properties(prbox).ks_verdict.contextual


def test_consistification_properties_random():
    for conditioning in ("any", "nondisturbing"):
        cfg = config("triangle", conditioning=conditioning, seed=3)
        for index in range(10):
            assert verify_consistification_properties(random_behavior(cfg, index)).ok


def test_cbd2_verdicts_on_disturbing_cycles_verify():
    cfg = config("cycle4", conditioning="disturbing", seed=8)
    decide = get_decider("cbd2")
    for index in range(5):
        verdict = decide(random_behavior(cfg, index))
        assert verify_verdict(verdict) == [], index


@pytest.mark.slow
def test_consistification_properties_sweep():
    for shape in ("cycle4", "triangle"):
        for conditioning in ("any", "nondisturbing"):
            cfg = config(shape, conditioning=conditioning, seed=11)
            for index in range(50):
                report = verify_consistification_properties(random_behavior(cfg, index))
                assert report.ok, (shape, conditioning, index, report.problems)


# =============================================================================
# Random behaviors
# =============================================================================

def test_random_behavior_is_valid_and_deterministic():
    cfg = config(conditioning="any", seed=0)
    first = random_behavior(cfg, 5)
    assert validate_behavior(first) == []
    assert random_behavior(cfg, 5) == first


@pytest.mark.parametrize("shape", ["cycle4", "triangle", "pair2"])
def test_random_behavior_conditioning(shape):
    for index in range(5):
        assert is_nondisturbing(random_behavior(config(shape, conditioning="nondisturbing"), index))
        assert not is_nondisturbing(random_behavior(config(shape, conditioning="disturbing"), index))


def test_disturbing_conditioning_can_fail():
    scenario = Scenario.from_lists([("a", ("0", "1")), ("b", ("0", "1"))], [("c1", ["a"]), ("c2", ["b"])])
    cfg = SearchConfig(scenario=scenario, conditioning="disturbing", budget=3)
    with pytest.raises(DomainError):
        random_behavior(cfg, 0)


def test_perturbation_breaks_nondisturbance(prbox):
    rng = random.Random(1)
    assert not is_nondisturbing(perturb_behavior(prbox, rng, 4))


def test_search_config_from_model():
    model = SearchConfigModel(shape="pair2", budget=7, seed=5)
    cfg = SearchConfig.from_model(model)
    assert cfg.scenario == SHAPES["pair2"]
    assert cfg.budget == 7
    with pytest.raises(FormatError):
        SearchConfig.from_model(SearchConfigModel(shape="nope"))
    with pytest.raises(FormatError):
        config(budget=0)


def test_seed_override_from_environment(monkeypatch):
    model = SearchConfigModel(shape="pair2", seed=5)
    monkeypatch.setattr(settings, "SEED", None)
    assert SearchConfig.from_model(model).seed == 5
    monkeypatch.setattr(settings, "SEED", 99)
    assert SearchConfig.from_model(model).seed == 99


def test_default_denominator_comes_from_settings(monkeypatch):
    monkeypatch.setattr(settings, "DEFAULT_DENOMINATOR", 6)
    assert SearchConfig.from_model(SearchConfigModel(shape="pair2")).denominator == 6
    assert SearchConfig.from_model(SearchConfigModel(shape="pair2", denominator=3)).denominator == 3
    assert config().denominator == 6


# =============================================================================
# Catalogs and search
# =============================================================================

def test_catalog_sizes():
    catalog = transform_catalog(SHAPES["cycle4"])
    counts = {}
    for principle, _ in catalog:
        counts[principle] = counts.get(principle, 0) + 1
    assert counts == {"nestedness": 12, "coarse-graining": 4, "post-processing": 8}
    assert [p for p, _ in transform_catalog(SHAPES["cycle4"], ["coarse-graining"])] == ["coarse-graining"] * 4


def test_ks_search_finds_nothing_and_is_deterministic():
    cfg = config(theory="ks", conditioning="nondisturbing", budget=4, seed=2, perturb=False)
    first = search_counterexamples(cfg)
    assert first.violations == ()
    assert not first.exhausted
    assert search_counterexamples(cfg).to_json_lines() == first.to_json_lines()


def test_cbd2_search_metadata():
    cfg = config("pair2", theory="cbd2", budget=3, seed=0)
    result = search_counterexamples(cfg)
    summary = result.summary()
    assert summary["candidates"] == 3
    assert summary["expects_violation"] is True
    assert summary["exhausted"] == (not result.violations)
    for data in result.violations:
        assert data["status"] == "violated"
        assert reverify_report(data) == []


@pytest.mark.slow
def test_parallel_search_matches_serial():
    serial = search_counterexamples(config("pair2", budget=12, seed=4, workers=1))
    parallel = search_counterexamples(config("pair2", budget=12, seed=4, workers=2))
    assert parallel.to_json_lines() == serial.to_json_lines()


@pytest.mark.slow
def test_ks_monotonicity_sweep():
    configs = [config(shape, conditioning="nondisturbing", seed=21) for shape in ("cycle4", "triangle")]
    catalogs = [transform_catalog(cfg.scenario) for cfg in configs]
    collected = 0
    for index in range(2000):
        if collected == 200:
            break
        cfg, catalog = configs[index % 2], catalogs[index % 2]
        b = random_behavior(cfg, index // 2)
        before = decide_ks(b)
        if before.contextual:
            continue
        collected += 1
        for principle, spec in catalog:
            report = check_principle("ks", b, spec, principle=principle, before=before)
            assert report.status == "respected", (cfg.shape, index // 2, principle)
    assert collected == 200


@pytest.mark.slow
def test_extension_property_sweep():
    behaviors = []
    for shape in ("cycle4", "triangle"):
        cfg = config(shape, conditioning="nondisturbing", seed=5)
        behaviors.extend(random_behavior(cfg, i) for i in range(100))
    assert check_extension_property(get_decider("cbd2"), behaviors) == []
