import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from contextlab.errors import DomainError
from contextlab.numlab import (
    NumTheory,
    check_axioms,
    consistify_number,
    divisor_count,
    evenness,
    invert_number,
    is_in_M,
    is_injective,
    is_prime,
    n1_anomaly,
    numlab_report,
    scan_equivalence,
)


@given(st.integers(min_value=1, max_value=5000))
def test_arithmetic_matches_sympy(n):
    assert divisor_count(n) == sympy.divisor_count(n)
    assert is_prime(n) == sympy.isprime(n)


@pytest.mark.parametrize("n,image", [(1, 1), (2, 2), (6, 24), (9, 18), (11, 11), (12, 192)])
def test_consistify_number(n, image):
    assert consistify_number(n) == image


def test_membership_in_M():
    assert is_in_M(2) and is_in_M(7) and is_in_M(18)
    assert not is_in_M(1) and not is_in_M(9)


def test_evenness_under_both_theories():
    assert evenness(9, NumTheory.T)
    assert not evenness(11, NumTheory.T)
    assert evenness(2, NumTheory.T)
    assert evenness(18, NumTheory.TPRIME)
    assert not evenness(11, "Tprime")
    with pytest.raises(DomainError, match="outside M"):
        evenness(9, NumTheory.TPRIME)


def test_nonpositive_input_rejected():
    with pytest.raises(DomainError):
        consistify_number(0)


def test_invert_number():
    assert invert_number(24) == 6
    assert invert_number(18) == 9
    assert invert_number(11) == 11
    assert invert_number(9) is None
    assert invert_number(1) == 1


@given(st.integers(min_value=2, max_value=2000))
def test_inversion_recovers_n(n):
    assert invert_number(consistify_number(n)) == n


def test_equivalence_holds_to_ten_thousand():
    assert scan_equivalence(10 ** 4) == []
    assert is_injective(10 ** 4)


def test_scan_bound_checked():
    with pytest.raises(DomainError):
        scan_equivalence(1)


def test_axiom_does_not_survive_transport():
    report = check_axioms(1000)
    assert report.standard == []
    assert report.smallest_transported == 9
    assert report.under_T == report.transported
    data = report.to_json()
    assert data["axiom_holds"] is True
    assert data["smallest_transported_images"] == [18, 11]


def test_n1_anomaly():
    anomaly = n1_anomaly()
    assert anomaly["image"] == 1
    assert anomaly["even_under_T"] is True
    assert anomaly["image_in_M"] is False


def test_report_shape():
    report = numlab_report(100)
    assert report["equivalence"] == {"checked": 99, "mismatches": []}
    assert report["injective"] is True
    assert report["axioms"]["smallest_transported_counterexample"] == 9
    assert report["n1_anomaly"]["n"] == 1
