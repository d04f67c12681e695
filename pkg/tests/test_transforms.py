from fractions import Fraction

import pytest

from contextlab.core import Behavior, Distribution, Scenario, check_nondisturbance
from contextlab.errors import ConsistificationError, DomainError, TransformError
from contextlab.models import behavior_from_json, behavior_to_json
from contextlab.principles import commutation_report
from contextlab.transforms import (
    CoarseGrainSpec,
    ConsistifySpec,
    DeconsistifySpec,
    NestSpec,
    PostProcessSpec,
    apply_transform,
    coarse_grain,
    consistify,
    deconsistify,
    nest,
    post_process,
)

HALF = Fraction(1, 2)


# =============================================================================
# Nesting
# =============================================================================

def test_drop_context(prbox):
    result = nest(prbox, NestSpec.drop_context(prbox.scenario, "c14"))
    assert result.scenario.context_names == ["c12", "c23", "c34"]
    assert result.distribution("c12") == prbox.distribution("c12")


def test_drop_incidence_keeps_marginal(prbox):
    result = nest(prbox, NestSpec.drop_incidence(prbox.scenario, "q1", "c12"))
    assert result.scenario.context("c12").observables == ("q2",)
    assert result.distribution("c12").weights == {("-1",): HALF, ("+1",): HALF}


def test_drop_observable(prbox):
    result = nest(prbox, NestSpec.drop_observable(prbox.scenario, "q4"))
    assert "q4" not in result.scenario.observable_names
    assert result.scenario.context("c34").observables == ("q3",)


def test_nest_rejects_unknown_and_empty(prbox):
    with pytest.raises(TransformError, match="unknown context"):
        nest(prbox, NestSpec(contexts=frozenset({"c99"})))
    with pytest.raises(TransformError, match="would keep no observable"):
        nest(prbox, NestSpec(incidences=frozenset()))


def test_nest_cannot_add_incidences(prbox):
    with pytest.raises(TransformError, match="not a kept measurement"):
        nest(prbox, NestSpec(incidences=frozenset({("q3", "c12")})))


# =============================================================================
# Coarse-graining
# =============================================================================

def test_constant_merge(prbox):
    spec = CoarseGrainSpec.from_merges(prbox.scenario, {"q1": [["-1", "+1"]]})
    result = coarse_grain(prbox, spec)
    assert result.scenario.outcomes("q1") == ("-1+1",)
    assert result.distribution("c12").weights == {("-1+1", "-1"): HALF, ("-1+1", "+1"): HALF}
    assert result.distribution("c23") == prbox.distribution("c23")


def test_explicit_relabel(prbox):
    result = coarse_grain(prbox, CoarseGrainSpec({"q2": {"-1": "down", "+1": "up"}}))
    assert result.scenario.outcomes("q2") == ("down", "up")
    assert result.distribution("c12").probability(("+1", "up")) == HALF


def test_coarse_grain_must_be_total(prbox):
    with pytest.raises(TransformError, match="not total"):
        coarse_grain(prbox, CoarseGrainSpec({"q1": {"-1": "x"}}))
    with pytest.raises(TransformError, match="unknown observable"):
        coarse_grain(prbox, CoarseGrainSpec({"zz": {}}))


# =============================================================================
# Post-processing
# =============================================================================

def test_product_appends_to_jointly_measuring_contexts(prbox):
    result = post_process(prbox, PostProcessSpec(("q1", "q2"), "q1*q2", function="product"))
    assert result.scenario.context("c12").observables == ("q1", "q2", "q1*q2")
    assert result.scenario.context("c14").observables == ("q1", "q4")
    assert result.distribution("c12").weights == {
        ("-1", "-1", "+1"): HALF,
        ("+1", "+1", "+1"): HALF,
    }


def test_parity_table(prbox):
    result = post_process(prbox, PostProcessSpec(("q1", "q4"), "q1^q4", function="parity"))
    assert result.scenario.outcomes("q1^q4") == ("0", "1")
    assert result.distribution("c14").weights == {("-1", "+1", "1"): HALF, ("+1", "-1", "1"): HALF}


def test_explicit_table(prbox):
    table = {(u, v): ("same" if u == v else "diff") for u in ("-1", "+1") for v in ("-1", "+1")}
    result = post_process(prbox, PostProcessSpec(("q3", "q4"), "eq34", table=table))
    assert result.scenario.outcomes("eq34") == ("same", "diff")
    assert result.distribution("c34").probability(("+1", "+1", "same")) == HALF


def test_post_process_needs_joint_measurement(prbox):
    with pytest.raises(TransformError, match="not jointly measured"):
        post_process(prbox, PostProcessSpec(("q1", "q3"), "f", function="product"))


def test_post_process_rejects_partial_table(prbox):
    with pytest.raises(TransformError, match="not total"):
        post_process(prbox, PostProcessSpec(("q1", "q2"), "f", table={("-1", "-1"): "a"}))


# =============================================================================
# Consistification
# =============================================================================

def test_consistified_prbox_shape(prbox):
    bt = consistify(prbox)
    assert len(bt.scenario.observables) == 8
    assert bt.scenario.context_names[:4] == ["row:c12", "row:c23", "row:c34", "row:c14"]
    assert bt.scenario.context_names[4:] == ["col:q1", "col:q2", "col:q3", "col:q4"]
    assert bt.scenario.context("col:q1").observables == ("q1@c12", "q1@c14")
    assert bt.distribution("col:q1").weights == {("-1", "-1"): HALF, ("+1", "+1"): HALF}
    assert check_nondisturbance(bt) is None


def test_consistify_round_trip(prbox, maximally_disturbing):
    for b in (prbox, maximally_disturbing):
        recovered = deconsistify(consistify(b))
        assert recovered == b


def test_maximal_disturbance_column_is_comonotone(maximally_disturbing):
    bt = consistify(maximally_disturbing)
    assert bt.distribution("col:q").weights == {("-1", "+1"): Fraction(1)}


def test_consistify_outside_domain():
    scenario = Scenario.from_lists([("q", ("a", "b", "c"))], [("c1", ["q"])])
    b = Behavior.from_tables(scenario, {"c1": {("a",): Fraction(1)}})
    with pytest.raises(DomainError):
        consistify(b)


def test_deconsistify_needs_provenance(prbox):
    with pytest.raises(ConsistificationError):
        deconsistify(prbox)


def test_deconsistify_reads_row_contexts(prbox):
    bt = consistify(prbox)
    edited = dict(bt.distributions)
    edited["row:c12"] = Distribution(
        bt.scenario.context_variables("row:c12"), {("-1", "+1"): HALF, ("+1", "-1"): HALF}
    )
    recovered = deconsistify(Behavior(bt.scenario, edited, provenance=bt.provenance))
    assert recovered.distribution("c12").weights == {("-1", "+1"): HALF, ("+1", "-1"): HALF}
    assert recovered.distribution("c23") == prbox.distribution("c23")


def test_provenance_survives_json(prbox):
    bt = consistify(prbox)
    reloaded = behavior_from_json(behavior_to_json(bt))
    assert reloaded == bt
    assert deconsistify(reloaded) == prbox


def test_apply_transform_dispatch(prbox):
    bt = apply_transform(prbox, ConsistifySpec())
    assert apply_transform(bt, DeconsistifySpec()) == prbox


# =============================================================================
# Commutation with consistification
# =============================================================================

def test_nest_and_coarse_grain_commute(prbox):
    for spec in (
        NestSpec.drop_context(prbox.scenario, "c14"),
        NestSpec.drop_incidence(prbox.scenario, "q1", "c12"),
        CoarseGrainSpec.from_merges(prbox.scenario, {"q2": [["-1", "+1"]]}),
    ):
        assert commutation_report(prbox, spec).equal, spec


def test_post_processing_does_not_commute(prbox):
    report = commutation_report(prbox, PostProcessSpec(("q1", "q2"), "q1*q2", function="product"))
    assert not report.equal
    data = report.to_json()
    assert data["transform_then_consistify"]["contexts"] == 9
    assert data["consistify_then_transform"]["contexts"] == 8
