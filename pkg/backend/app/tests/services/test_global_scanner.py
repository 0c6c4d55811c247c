# backend/app/tests/services/test_global_scanner.py
import math
from fractions import Fraction

import pytest

from app.core.exceptions import (
    NonIntegralLatticeError,
    NotPositiveDefiniteError,
    OutOfScopeError,
    RepresentedTargetError,
)
from app.models.reports import HypothesisStatus, ProgressionWitness, Tri
from app.services import lattice_model as lm
from app.services.global_scanner import (
    almost_universality_verdict,
    completed_squares,
    enumerate_values,
    is_positive_definite,
    progression_witness,
    relevant_primes,
    theorem3_check,
)


@pytest.fixture(scope="module")
def ramanujan_scan():
    """x² + y² + z² + 9w² 扫描到 200。"""
    return enumerate_values(lm.diag(1, 1, 1, 9), 200)


# --- Positive definiteness ---

def test_completed_squares():
    squares = completed_squares(lm.diag(1, 2))
    assert squares.pivots == [Fraction(1), Fraction(2)]
    assert completed_squares(lm.diag(1, -1)) is None
    assert is_positive_definite(lm.Ahat())
    assert not is_positive_definite(lm.H())


# --- Enumeration ---

def test_rank_one_scan():
    scan = enumerate_values(lm.diag(1), 10)
    assert scan.represented == (1, 4, 9)
    assert scan.primitively_represented == (1,)
    assert scan.represented_count == 3


def test_half_form_scan():
    """x² + xy + y² 的本原值只含 3 至多一次。"""
    scan = enumerate_values(lm.Ahat(), 10)
    assert scan.represented == (1, 3, 4, 7, 9)
    assert scan.primitively_represented == (1, 3, 7)


def test_ramanujan_exclusions(ramanujan_scan):
    assert ramanujan_scan.excluded == (7,)
    for k in range(8, 201, 64):
        assert k in ramanujan_scan.primitive_excluded


def test_witnesses_evaluate_to_their_values(ramanujan_scan):
    L = lm.diag(1, 1, 1, 9)
    for value, vector in ramanujan_scan.witnesses.items():
        assert L.q(vector) == value
    for value, vector in ramanujan_scan.primitive_witnesses.items():
        assert L.q(vector) == value
        assert math.gcd(*vector) == 1


def test_threaded_scan_matches_single_thread():
    L = lm.diag(1, 1, 25, 25)
    assert enumerate_values(L, 300, threads=4) == enumerate_values(L, 300, threads=1)


def test_bochnak_oh_misses_three_times_powers_of_four():
    scan = enumerate_values(lm.diag(1, 1, 25, 25), 800)
    assert {3, 12, 48, 192, 768} <= set(scan.excluded)


def test_scan_rejects_indefinite_and_bad_bounds():
    with pytest.raises(NotPositiveDefiniteError):
        enumerate_values(lm.diag(1, -1), 10)
    with pytest.raises(ValueError):
        enumerate_values(lm.diag(1), 0)


# --- Progression witnesses and verdicts ---

def test_progression_witness_for_ramanujan_form():
    witness = progression_witness(lm.diag(1, 1, 1, 9), 2, 8, primitive=True)
    assert (witness.residue, witness.modulus) == (0, 8)


def test_progression_witness_for_ahat():
    witness = progression_witness(lm.Ahat(), 2, 2, primitive=True)
    assert (witness.residue, witness.modulus) == (0, 2)


def test_progression_witness_rejects_represented_targets():
    with pytest.raises(RepresentedTargetError):
        progression_witness(lm.diag(1, 1, 25, 25), 2, 3, primitive=False)


def test_relevant_primes():
    assert relevant_primes(lm.diag(1, 1, 1, 9)) == (2, 3)
    assert relevant_primes(lm.diag(1, 1, 25, 25)) == (2, 5)
    assert relevant_primes(lm.diag(1, 1, 1, 1, 1)) == (2,)


def test_verdict_for_sum_of_five_squares():
    verdict = almost_universality_verdict(lm.diag(1, 1, 1, 1, 1))
    assert verdict.almost_universal == Tri.YES
    assert verdict.almost_primitively_universal == Tri.YES
    assert not verdict.progression_witnesses


def test_verdict_for_ramanujan_form():
    verdict = almost_universality_verdict(lm.diag(1, 1, 1, 9))
    assert verdict.almost_primitively_universal == Tri.NO
    assert verdict.almost_universal != Tri.NO
    assert verdict.per_prime[2].primitively_universal == Tri.NO
    assert verdict.per_prime[3].primitively_universal == Tri.YES
    expected = ProgressionWitness(prime=2, target="8", primitive=True, residue=0, modulus=8)
    assert expected in verdict.progression_witnesses


def test_verdict_for_locally_universal_anisotropic_quaternary():
    verdict = almost_universality_verdict(lm.diag(1, 1, 25, 25))
    assert verdict.almost_primitively_universal == Tri.NO
    assert verdict.per_prime[2].universal and verdict.per_prime[5].universal
    assert any("anisotropic over Z_2" in note for note in verdict.notes)


def test_verdict_rejects_small_rank():
    with pytest.raises(OutOfScopeError):
        almost_universality_verdict(lm.diag(1, 1, 1))


# --- Discriminant criterion ---

@pytest.mark.parametrize("entries", [(1, 1, 1, 1, 1), (1, 1, 1, 2)])
def test_discriminant_criterion_applies(entries):
    report = theorem3_check(lm.diag(*entries))
    assert report.applicable
    assert report.verdict == Tri.YES
    assert report.cross_check is True


@pytest.mark.parametrize("entries, hypothesis", [
    ((1, 1, 1, 9), "rank-five-or-even-quaternary"),
    ((1, 1, 1, 9), "discriminant-power-free"),
    ((1, 1, 2, 4), "discriminant-power-free"),
    ((1, 1, 1), "rank-at-least-four"),
])
def test_discriminant_criterion_names_failed_hypotheses(entries, hypothesis):
    report = theorem3_check(lm.diag(*entries))
    assert not report.applicable
    assert report.verdict == Tri.UNDETERMINED
    assert hypothesis in report.failed()


def test_even_forms_fail_the_odd_value_hypothesis():
    report = theorem3_check(lm.diag(2, 2, 2, 2, 2))
    statuses = {h.name: h.status for h in report.hypotheses}
    assert statuses["represents-odd"] == HypothesisStatus.FAILS


def test_discriminant_criterion_needs_classical_integrality():
    with pytest.raises(NonIntegralLatticeError):
        theorem3_check(lm.orthogonal_sum(lm.Ahat(), lm.diag(1, 1, 1)))
