"""
ContextLab Number Lab

The number-theoretic toy version of the consistification argument:
C(n) = 2^(d(n) - 2) * n maps every n >= 2 into M = primes + even numbers,
theory T ("n is even iff n is 2 or nonprime") becomes ordinary evenness
on M, and the axiom "n even => n + 2 even" does not survive the trip.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

from .errors import DomainError

logger = logging.getLogger(__name__)


class NumTheory(str, Enum):
    """Two notions of evenness. TPRIME is only defined on M."""
    T = "T"
    TPRIME = "Tprime"


# =============================================================================
# Arithmetic
# =============================================================================

def _check_positive(n: int):
    if n < 1:
        raise DomainError(f"expected a positive integer, got {n}")


def divisor_count(n: int) -> int:
    _check_positive(n)
    count = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            count += 1 if d * d == n else 2
        d += 1
    return count


def is_prime(n: int) -> bool:
    """Trial division."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def consistify_number(n: int) -> int:
    """C(1) = 1, otherwise 2^(d(n) - 2) * n."""
    _check_positive(n)
    if n == 1:
        return 1
    return 2 ** (divisor_count(n) - 2) * n


def is_in_M(n: int) -> bool:
    _check_positive(n)
    return is_prime(n) or n % 2 == 0


def evenness(n: int, theory: NumTheory) -> bool:
    _check_positive(n)
    if NumTheory(theory) is NumTheory.T:
        return n == 2 or not is_prime(n)
    if not is_in_M(n):
        raise DomainError(f"{n} is outside M, where Tprime evenness is undefined")
    return n % 2 == 0


def invert_number(m: int) -> Optional[int]:
    """
    The n with C(n) = m, or None. C(n) is n times a power of two, so only
    m, m/2, m/4, ... need checking.
    """
    _check_positive(m)
    if m == 1:
        return 1
    n = m
    while n >= 2:
        if consistify_number(n) == m:
            return n
        if n % 2:
            break
        n //= 2
    return None


# =============================================================================
# Scans
# =============================================================================

def _check_range(nmax: int):
    if nmax < 2:
        raise DomainError(f"scan bound must be at least 2, got {nmax}")


def scan_equivalence(nmax: int) -> List[dict]:
    """
    Every failure, for 2 <= n <= nmax, of: C(n) in M, T-evenness of n equal
    to Tprime-evenness of C(n), and injectivity of C. Ascending in n.
    """
    _check_range(nmax)
    mismatches = []
    seen: Dict[int, int] = {}
    for n in range(2, nmax + 1):
        image = consistify_number(n)
        if image in seen:
            mismatches.append({"n": n, "kind": "collision", "image": image, "other": seen[image]})
        seen[image] = n
        if not is_in_M(image):
            mismatches.append({"n": n, "kind": "outside_M", "image": image})
            continue
        if evenness(n, NumTheory.T) != evenness(image, NumTheory.TPRIME):
            mismatches.append({"n": n, "kind": "evenness", "image": image})
    logger.info(f"Equivalence scan to {nmax}: {len(mismatches)} mismatches")
    return mismatches


def is_injective(nmax: int) -> bool:
    _check_range(nmax)
    images = [consistify_number(n) for n in range(2, nmax + 1)]
    return len(set(images)) == len(images)


@dataclass(frozen=True)
class AxiomReport:
    nmax: int
    standard: List[int]        # n with n even, n + 2 odd
    under_T: List[int]         # same axiom with T-evenness
    transported: List[int]     # n with C(n) even, C(n + 2) odd

    @property
    def smallest_transported(self) -> Optional[int]:
        return self.transported[0] if self.transported else None

    def to_json(self) -> dict:
        smallest = self.smallest_transported
        data = {
            "nmax": self.nmax,
            "axiom_holds": not self.standard,
            "axiom_counterexamples": self.standard,
            "axiom_under_T_counterexamples": self.under_T,
            "transported_axiom_counterexamples": self.transported,
            "smallest_transported_counterexample": smallest,
        }
        if smallest is not None:
            data["smallest_transported_images"] = [
                consistify_number(smallest),
                consistify_number(smallest + 2),
            ]
        return data


def check_axioms(nmax: int) -> AxiomReport:
    """Counterexamples for 2 <= n <= nmax of the axiom, under each evenness."""
    _check_range(nmax)
    standard, under_t, transported = [], [], []
    for n in range(2, nmax + 1):
        if n % 2 == 0 and (n + 2) % 2 != 0:
            standard.append(n)
        if evenness(n, NumTheory.T) and not evenness(n + 2, NumTheory.T):
            under_t.append(n)
        if consistify_number(n) % 2 == 0 and consistify_number(n + 2) % 2 != 0:
            transported.append(n)
    return AxiomReport(nmax, standard, under_t, transported)


def n1_anomaly() -> dict:
    """n = 1 is left out of every scan: T calls it even, C(1) = 1 is odd and not in M."""
    return {
        "n": 1,
        "image": consistify_number(1),
        "even_under_T": evenness(1, NumTheory.T),
        "image_in_M": is_in_M(consistify_number(1)),
        "note": "C(1) = 1 is neither prime nor even, so Tprime is undefined there; "
                "T calls 1 even because 1 is nonprime. n = 1 is excluded from the scans.",
    }


def numlab_report(nmax: int) -> dict:
    """Everything the numlab command prints."""
    mismatches = scan_equivalence(nmax)
    axioms = check_axioms(nmax)
    anomaly = n1_anomaly()
    logger.warning(f"n = 1 anomaly: {anomaly['note']}")
    return {
        "nmax": nmax,
        "equivalence": {"checked": nmax - 1, "mismatches": mismatches},
        "injective": is_injective(nmax),
        "axioms": axioms.to_json(),
        "n1_anomaly": anomaly,
    }
