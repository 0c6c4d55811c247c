# backend/app/tests/services/test_local_analyzer.py
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from pydantic import ValidationError

from app.core.exceptions import (
    GapUndefinedError,
    NegativeValuationError,
    NonIntegralLatticeError,
    ZeroValueError,
)
from app.models.reports import Decision, RepVerdict, Rule, Tri, UniversalityReport
from app.models.square_class import SquareClass
from app.services import lattice_model as lm
from app.services.lattice_sampler import random_lattice
from app.services.local_analyzer import (
    analyze_local,
    anisotropic_gap,
    binary_unit_profile,
    decide_representation,
    is_primitively_universal_local,
    is_universal_local,
    isotropic_by_residues,
    primitive_level,
    spectrum,
    spectrum_report,
    unit_classes_with_small_complement,
)
from app.services.padic_core import square_classes, valuation


def _assert_certificate(L, p, verdict: RepVerdict):
    """见证满足同余且 Hensel 条件 K ≥ 2d + 1。"""
    a = Fraction(verdict.target)
    difference = L.q(verdict.witness) - a
    assert difference == 0 or valuation(difference, p) >= verdict.witness_level
    assert verdict.witness_level >= 2 * verdict.gradient_valuation + 1
    if verdict.primitive:
        assert any(x % p for x in verdict.witness)


# --- Single targets ---

def test_anisotropic_ternary_at_three():
    L = lm.diag(1, 1, 3, 3)
    primitive = decide_representation(L, 3, 9, primitive=True)
    assert primitive.decided == Decision.NOT_REPRESENTED
    plain = decide_representation(L, 3, 9, primitive=False)
    assert plain.represented
    _assert_certificate(L, 3, plain)


def test_rank_one_non_primitive_target():
    verdict = decide_representation(lm.diag(1), 5, 4, primitive=False)
    assert verdict.represented
    _assert_certificate(lm.diag(1), 5, verdict)
    assert not decide_representation(lm.diag(1), 5, 2, primitive=False).represented


@pytest.mark.parametrize("L, p, a", [
    (lm.diag(3), 5, 3),
    (lm.diag(9), 5, 1),
    (lm.diag(15), 3, 6),
    (lm.diag(13, 7), 2, 13),
    (lm.diag(1, 1, 1, 3), 5, 10),
])
def test_units_away_from_the_class_representative(L, p, a):
    for primitive in (False, True):
        verdict = decide_representation(L, p, a, primitive)
        assert verdict.represented
        _assert_certificate(L, p, verdict)


def test_spectrum_with_non_representative_units():
    assert spectrum(lm.diag(1, 1, 1, 3), 5, 2, primitive=True) == square_classes(5, 2)


def test_primitive_and_plain_differ_on_ramanujan_form():
    L = lm.diag(1, 1, 1, 9)
    missing = decide_representation(L, 2, 8, primitive=True)
    assert missing.decided == Decision.NOT_REPRESENTED
    assert missing.exhaustion_level == 3
    assert decide_representation(L, 2, 8, primitive=False).represented


def test_half_scaled_planes():
    assert decide_representation(lm.Hhat(), 2, 2, primitive=True).represented
    assert not decide_representation(lm.Ahat(), 2, 2, primitive=True).represented
    assert decide_representation(lm.Ahat(), 2, 4, primitive=False).represented


def test_decide_rejects_bad_input():
    with pytest.raises(ZeroValueError):
        decide_representation(lm.diag(1, 1), 3, 0, primitive=False)
    with pytest.raises(NegativeValuationError):
        decide_representation(lm.diag(1, 1), 2, Fraction(1, 2), primitive=False)
    with pytest.raises(NonIntegralLatticeError):
        decide_representation(lm.diag(Fraction(1, 2)), 2, 1, primitive=False)


def test_primitive_level():
    assert primitive_level(lm.diag(1, 1, 1, 9), 2) == 3
    assert primitive_level(lm.diag(1, 1, 3, 3), 3) == 3
    assert primitive_level(lm.Ahat(), 2) == 1


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6), p=st.sampled_from([2, 3]),
       a=st.integers(min_value=1, max_value=64))
def test_primitive_representation_implies_representation(seed, p, a):
    L = random_lattice(random.Random(seed), p, 3)
    primitive = decide_representation(L, p, a, primitive=True)
    plain = decide_representation(L, p, a, primitive=False)
    if primitive.represented:
        assert plain.represented
        _assert_certificate(L, p, primitive)
    if plain.represented:
        _assert_certificate(L, p, plain)


# --- Spectra and universality ---

def test_ahat_primitive_spectrum_is_the_units():
    report = spectrum_report(lm.Ahat(), 2, 3, primitive=True)
    assert [cls.value for cls in report.found] == [1, 3, 5, 7]
    assert len(report.missing) == len(square_classes(2, 3)) - 4


def test_hhat_is_primitively_universal_at_small_primes():
    for p in (2, 3, 5):
        assert spectrum(lm.Hhat(), p, 3, primitive=True) == square_classes(p, 3)


def test_universality_of_sums_of_squares():
    assert is_universal_local(lm.diag(1, 1, 1, 1), 2).universal
    check = is_universal_local(lm.diag(1, 1, 1), 2)
    assert not check.universal
    assert SquareClass(prime=2, order=0, unit_rep=7) in check.missing
    assert "1" in check.witnesses


@pytest.mark.parametrize("L, p, verdict, rule", [
    (lm.diag(1, 1, 3, 3), 3, Tri.NO, Rule.ANISOTROPIC),
    (lm.diag(1, 1, 1, 1), 2, Tri.NO, Rule.ANISOTROPIC),
    (lm.diag(1, 1, 1), 2, Tri.NO, Rule.ANISOTROPIC),
    (lm.diag(1, 1, 1, 1, 1), 2, Tri.YES, Rule.RANK_FIVE_UNIVERSAL),
    (lm.A(), 2, Tri.NO, Rule.NORM_NOT_UNIT),
    (lm.diag(3, 9), 3, Tri.NO, Rule.NORM_NOT_UNIT),
    (lm.Hhat(), 2, Tri.YES, Rule.IMPROPER_HALF_MODULAR),
    (lm.Hhat(), 3, Tri.YES, Rule.UNIMODULAR_ODD),
    (lm.diag(1, 7), 2, Tri.NO, Rule.PROPER_UNIMODULAR_BINARY),
    (lm.diag(1, 1, 7), 2, Tri.YES, Rule.UNIMODULAR_TERNARY_CRITERION),
    (lm.orthogonal_sum(lm.Hhat(), lm.diag(2)), 2, Tri.YES, Rule.UNIVERSAL_SUMMAND),
    (lm.diag(1, 1, 1, 2), 2, Tri.YES, Rule.UNIT_SPLIT),
    (lm.orthogonal_sum(lm.Ahat(), lm.A()), 2, Tri.NO, Rule.ANISOTROPIC),
])
def test_primitive_universality_verdicts(L, p, verdict, rule):
    report = is_primitively_universal_local(L, p)
    assert report.primitively_universal == verdict
    assert rule in report.fired()
    if verdict == Tri.YES:
        assert report.universal


def test_half_scaled_lattices_are_flagged():
    report = is_primitively_universal_local(lm.orthogonal_sum(lm.Hhat(), lm.diag(2)), 2)
    assert report.fired()[0] == Rule.HALF_SCALED


def test_modular_rank_five_records_both_rules():
    report = is_primitively_universal_local(lm.diag(1, 1, 1, 1, 1), 2)
    assert report.fired() == [Rule.UNIMODULAR_RANK_FIVE, Rule.RANK_FIVE_UNIVERSAL]


def test_universal_but_not_primitively_universal():
    report = is_primitively_universal_local(lm.orthogonal_sum(lm.Ahat(), lm.A()), 2)
    assert report.universal
    assert report.missing
    assert all(cls.order >= 2 for cls in report.missing)


def test_bounded_report_must_state_its_depth():
    with pytest.raises(ValidationError):
        UniversalityReport(prime=2, form="<1>", splitting="s=0: <1>", universal=True,
                           primitively_universal=Tri.BOUNDED)
    with pytest.raises(ValidationError):
        UniversalityReport(prime=2, form="<1>", splitting="s=0: <1>", universal=False,
                           primitively_universal=Tri.YES)


# --- Anisotropy ---

def test_gap_of_a():
    gap = anisotropic_gap(lm.A(), 2)
    assert (gap.bound, gap.empirical_min) == (3, 2)


def test_gap_of_sum_of_two_squares_at_three():
    gap = anisotropic_gap(lm.diag(1, 1), 3)
    assert (gap.bound, gap.empirical_min) == (3, 1)


def test_gap_of_scaled_lattice_is_shifted():
    gap = anisotropic_gap(lm.diag(3, 3), 3)
    assert gap.scale_shift == -1
    assert gap.bound == 3


def test_gap_rejects_isotropic_lattices():
    with pytest.raises(GapUndefinedError):
        anisotropic_gap(lm.orthogonal_sum(lm.A(), lm.scaled(lm.A(), 4)), 2)
    with pytest.raises(GapUndefinedError):
        anisotropic_gap(lm.H(), 2)


@pytest.mark.parametrize("L, p", [
    (lm.diag(1, 1, 3, 3), 3),
    (lm.diag(1, 1, 1, 1), 2),
    (lm.diag(1, 1, 1, 1, 1), 2),
    (lm.orthogonal_sum(lm.A(), lm.scaled(lm.A(), 2)), 2),
    (lm.orthogonal_sum(lm.A(), lm.scaled(lm.A(), 4)), 2),
    (lm.diag(1, 7), 2),
    (lm.diag(1, 1), 3),
    (lm.diag(1, 1), 5),
    (lm.Ahat(), 2),
])
def test_isotropy_routes_agree(L, p):
    assert isotropic_by_residues(L, p) == lm.is_isotropic(L, p)


# --- Unit classes ---

def test_binary_unit_profiles():
    odd_det = binary_unit_profile(lm.diag(1, 3))
    assert odd_det.det_mod4 == 3
    assert odd_det.unit_classes == (1, 3, 5, 7)
    assert not odd_det.represents_two_units
    assert not odd_det.universal

    even_det = binary_unit_profile(lm.diag(1, 1))
    assert even_det.det_mod4 == 1
    assert even_det.unit_classes == (1, 5)


def test_binary_unit_profile_needs_a_unimodular_binary():
    with pytest.raises(ValueError):
        binary_unit_profile(lm.diag(1, 1, 1))
    with pytest.raises(ValueError):
        binary_unit_profile(lm.H())


def test_small_complement_unit_classes():
    assert unit_classes_with_small_complement(1, lm.diag(4), 2) == [1, 5]
    assert unit_classes_with_small_complement(1, lm.diag(3), 3) == [1]
    with pytest.raises(ValueError):
        unit_classes_with_small_complement(1, lm.diag(2), 2)
    with pytest.raises(ValueError):
        unit_classes_with_small_complement(2, lm.diag(4), 2)


def test_analyze_local():
    analysis = analyze_local(lm.diag(1, 1, 3, 3), 3)
    assert analysis.hasse == -1
    assert not analysis.isotropic
    assert analysis.splitting.t == 1
    assert analysis.determinant_class.order == 2
    assert analysis.report.primitively_universal == Tri.NO
