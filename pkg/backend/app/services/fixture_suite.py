# backend/app/services/fixture_suite.py
"""
可执行的验收用例集 (命令行 verify-paper)。

每个用例是一个无参函数，返回 (是否通过, 说明)；run_fixtures 逐个执行并捕获异常，
任何异常都记为失败。随机用例的规模与种子来自配置。
"""
import itertools
import logging
import time
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from app.core.config import settings
from app.models.reports import FixtureResult, Rule, Tri
from . import lattice_model as lm
from .dyadic_inventory import DYADIC_UNITS, INVENTORY, FamilyKind, ShapeFamily
from .global_scanner import almost_universality_verdict, enumerate_values, theorem3_check
from .lattice_sampler import sample_lattices
from .local_analyzer import (
    anisotropic_gap,
    binary_unit_profile,
    decide_representation,
    is_primitively_universal_local,
    is_universal_local,
    isotropic_by_residues,
    spectrum,
    unit_classes_with_small_complement,
)
from .padic_core import square_classes
from .residue_oracle import naive_represents, oracle_level

logger = logging.getLogger(__name__)

Outcome = Tuple[bool, str]
FIXTURES: Dict[str, Callable[[], Outcome]] = {}


def fixture(name: str):
    def register(func: Callable[[], Outcome]) -> Callable[[], Outcome]:
        FIXTURES[name] = func
        return func
    return register


def _labels(classes) -> str:
    return "{" + ", ".join(cls.label() for cls in classes) + "}"


def _classes_up_to(p: int, orders: Iterable[int]):
    orders = set(orders)
    return [cls for cls in square_classes(p, max(orders)) if cls.order in orders]


# --- 小例子 ---

@fixture("hhat-primitively-universal")
def _hhat() -> Outcome:
    for p in (2, 3, 5):
        found = spectrum(lm.Hhat(), p, 4, primitive=True)
        if found != square_classes(p, 4):
            return False, f"p={p}: primitive spectrum {_labels(found)}"
    return True, "every class with e <= 4 is primitively represented for p = 2, 3, 5"


@fixture("ahat-units-only")
def _ahat() -> Outcome:
    found = spectrum(lm.Ahat(), 2, 3, primitive=True)
    if found != _classes_up_to(2, [0]):
        return False, f"primitive spectrum {_labels(found)}"
    if decide_representation(lm.Ahat(), 2, 2, primitive=True).represented:
        return False, "2 is primitively represented"
    return True, "primitive spectrum is the four unit classes; 2 is not primitively represented"


@fixture("anisotropic-universal-ternary-three")
def _one_one_three_three() -> Outcome:
    L = lm.diag(1, 1, 3, 3)
    if not is_universal_local(L, 3).universal:
        return False, "not Z_3-universal"
    report = is_primitively_universal_local(L, 3)
    if report.primitively_universal != Tri.NO or Rule.ANISOTROPIC not in report.fired():
        return False, f"verdict {report.primitively_universal.value}, rules {[r.value for r in report.fired()]}"
    found = spectrum(L, 3, 4, primitive=True)
    if found != _classes_up_to(3, [0, 1]):
        return False, f"primitive spectrum {_labels(found)}"
    return True, "universal, not primitively universal (anisotropic), primitive spectrum e in {0, 1}"


@fixture("ahat-plus-a")
def _ahat_plus_a() -> Outcome:
    L = lm.orthogonal_sum(lm.Ahat(), lm.A())
    report = is_primitively_universal_local(L, 2)
    if not report.universal or report.primitively_universal != Tri.NO:
        return False, f"universal {report.universal}, verdict {report.primitively_universal.value}"
    found = spectrum(L, 2, 3, primitive=True)
    if found != _classes_up_to(2, [0, 1]):
        return False, f"primitive spectrum {_labels(found)}"
    return True, "universal, not primitively universal, primitive spectrum is the eight classes with e in {0, 1}"


@fixture("anisotropic-gaps")
def _gaps() -> Outcome:
    for t in (1, 3):
        L = lm.orthogonal_sum(lm.A(), lm.scaled(lm.A(), 2 ** t))
        if lm.is_isotropic(L, 2) or isotropic_by_residues(L, 2):
            return False, f"A + A^({2 ** t}) reported isotropic"
        gap = anisotropic_gap(L, 2)
        if gap.bound != t + 3 or gap.empirical_min > t + 3:
            return False, f"t={t}: bound {gap.bound}, empirical {gap.empirical_min}"
    for t in (0, 2):
        L = lm.orthogonal_sum(lm.A(), lm.scaled(lm.A(), 2 ** t))
        if not lm.is_isotropic(L, 2) or not isotropic_by_residues(L, 2):
            return False, f"A + A^({2 ** t}) reported anisotropic"
    return True, "t = 1, 3 anisotropic with gap within t + 3; t = 0, 2 isotropic"


# --- 全局例子 ---

@fixture("sum-of-three-squares-plus-nine")
def _ramanujan() -> Outcome:
    L = lm.diag(1, 1, 1, 9)
    scan = enumerate_values(L, 2000)
    if scan.excluded != (7,):
        return False, f"excluded {scan.excluded}"
    progression = [k for k in range(8, 2001, 64)]
    absent = [k for k in progression if k not in scan.primitive_excluded]
    if absent:
        return False, f"primitively represented members of 8 + 64k: {absent}"
    if decide_representation(L, 2, 8, primitive=True).represented:
        return False, "8 is primitively represented over Z_2"
    verdict = almost_universality_verdict(L)
    if verdict.almost_primitively_universal != Tri.NO:
        return False, f"almost primitively universal: {verdict.almost_primitively_universal.value}"
    return True, "excluded {7}; 8 + 64k primitively excluded up to 2000"


@fixture("locally-universal-anisotropic-quaternary")
def _bochnak_oh() -> Outcome:
    L = lm.diag(1, 1, 25, 25)
    for p in (2, 5):
        if not is_universal_local(L, p).universal:
            return False, f"not Z_{p}-universal"
    if lm.is_isotropic(L, 2):
        return False, "isotropic over Z_2"
    scan = enumerate_values(L, 1000)
    expected = {3, 12, 48, 192, 768}
    if not expected <= set(scan.excluded):
        return False, f"represented: {sorted(expected - set(scan.excluded))}"
    verdict = almost_universality_verdict(L)
    if verdict.almost_primitively_universal != Tri.NO:
        return False, f"almost primitively universal: {verdict.almost_primitively_universal.value}"
    return True, "universal at 2 and 5, anisotropic at 2, misses 3*4^k up to 1000"


@fixture("discriminant-criterion")
def _theorem3() -> Outcome:
    for entries in ((1, 1, 1, 1, 1), (1, 1, 1, 2)):
        report = theorem3_check(lm.diag(*entries))
        if not report.applicable or report.verdict != Tri.YES or report.cross_check is not True:
            return False, f"{entries}: applicable {report.applicable}, failed {report.failed()}"
    expectations = {(1, 1, 1, 9): "rank-five-or-even-quaternary", (1, 1, 2, 4): "discriminant-power-free"}
    for entries, hypothesis in expectations.items():
        report = theorem3_check(lm.diag(*entries))
        if report.applicable or hypothesis not in report.failed():
            return False, f"{entries}: failed hypotheses {report.failed()}"
    return True, "<1,1,1,1,1>, <1,1,1,2> applicable; <1,1,1,9>, <1,1,2,4> not applicable"


# --- 二进清单 ---

@fixture("unimodular-quaternary-four-eight")
def _four_eight() -> Outcome:
    checked = 0
    for units in itertools.product(DYADIC_UNITS, repeat=4):
        if len({u % 4 for u in units}) != 1:
            continue
        L = lm.diag(*units)
        verdict = is_primitively_universal_local(L, 2).primitively_universal
        criterion = all(decide_representation(L, 2, a, primitive=True).represented for a in (4, 8))
        if (verdict == Tri.YES) != criterion:
            return False, f"{units}: verdict {verdict.value}, 4 and 8 represented: {criterion}"
        checked += 1
    return True, f"{checked} unit tuples agree with the 4 and 8 criterion"


def _family_failures(family: ShapeFamily) -> List[Tuple[int, ...]]:
    units_two = [2 * u for u in DYADIC_UNITS]
    failures = []
    for units, L in family.members():
        if family.kind == FamilyKind.UNIVERSAL:
            ok = is_universal_local(L, 2).universal
        else:
            targets = DYADIC_UNITS if family.kind in (FamilyKind.REPRESENTS_UNITS, FamilyKind.MISSES_UNITS) else units_two
            everything = all(decide_representation(L, 2, a, primitive=False).represented for a in targets)
            ok = everything if family.kind in (FamilyKind.REPRESENTS_UNITS, FamilyKind.REPRESENTS_TWO_UNITS) else not everything
        if not ok:
            failures.append(units)
    return failures


@fixture("dyadic-inventories")
def _inventories() -> Outcome:
    members = 0
    for family in INVENTORY:
        failures = _family_failures(family)
        if failures:
            return False, f"{family.name} {family.label()} fails for units {failures[:3]}"
        members += 4 ** len(family.exponents)
    return True, f"{len(INVENTORY)} shape families, {members} unit tuples"


@fixture("proper-unimodular-binaries")
def _binaries() -> Outcome:
    for units in itertools.product(DYADIC_UNITS, repeat=2):
        profile = binary_unit_profile(lm.diag(*units))
        if profile.universal:
            return False, f"{units} is universal"
        if profile.det_mod4 == 3 and (len(profile.unit_classes) != 4 or profile.represents_two_units):
            return False, f"{units}: det 3 mod 4 but units {profile.unit_classes}"
        if profile.det_mod4 == 1 and len({u % 4 for u in profile.unit_classes}) != 1:
            return False, f"{units}: det 1 mod 4 but units {profile.unit_classes}"
        for deep in (lm.diag(4 * units[0]), lm.diag(4 * units[1], 8 * units[0])):
            if is_universal_local(lm.orthogonal_sum(lm.diag(*units), deep), 2).universal:
                return False, f"{units} plus {deep} is universal"
    return True, "binary unit profiles and deep complements behave as expected"


@fixture("small-complement-unit-classes")
def _small_complement() -> Outcome:
    cases = {
        2: [lm.diag(4), lm.diag(4, 12), lm.diag(8, 20), lm.scaled(lm.A(), 2)],
        3: [lm.diag(3), lm.diag(3, 6), lm.diag(9, 6)],
        5: [lm.diag(5), lm.diag(5, 10)],
    }
    for p, complements in cases.items():
        limit = 2 if p == 2 else 1
        for K in complements:
            for epsilon in (1, 3, 5, 7) if p == 2 else (1, 2):
                classes = unit_classes_with_small_complement(epsilon, K, p)
                if len(classes) > limit:
                    return False, f"p={p}: <{epsilon}> + {K} represents unit classes {classes}"
    return True, "at most two unit classes at p = 2 and one at odd p"


# --- 随机性质 ---

@fixture("rank-five-universal-implies-primitive")
def _rank_five() -> Outcome:
    depth = settings.PADIQ_RANK5_SPECTRUM_DEPTH
    total = 0
    for p in (2, 3, 5):
        for L in sample_lattices(p, settings.PADIQ_RANK5_SAMPLES, range(5, 6)):
            if not is_universal_local(L, p).universal:
                continue
            total += 1
            found = spectrum(L, p, depth, primitive=True)
            if len(found) != len(square_classes(p, depth)):
                return False, f"p={p}: {L} universal but primitive spectrum {_labels(found)}"
    return True, f"{total} universal rank-5 lattices primitively represent every class with e <= {depth}"


# 每个素数 8 个目标；ord_p(a) >= 2 的目标经过非本原的 j 循环与截断精度
ORACLE_TARGETS: Dict[int, Tuple[int, ...]] = {
    2: (1, 3, 4, 7, 8, 12, 16, 36),
    3: (1, 2, 3, 6, 9, 18, 27, 36),
}


@fixture("naive-oracle-agreement")
def _oracle() -> Outcome:
    compared = skipped = 0
    for p in (2, 3):
        for L in sample_lattices(p, settings.PADIQ_ORACLE_SAMPLES, range(1, 5)):
            for a, primitive in itertools.product(ORACLE_TARGETS[p], (False, True)):
                try:
                    naive = naive_represents(L, p, a, primitive, oracle_level(a, p))
                except MemoryError:
                    skipped += 1
                    continue
                decided = decide_representation(L, p, a, primitive).represented
                if naive != decided:
                    return False, f"p={p}, {L}, a={a}, primitive={primitive}: naive {naive}, decided {decided}"
                compared += 1
    return True, f"{compared} decisions agree ({skipped} oversized searches skipped)"


@fixture("isotropy-routes-agree")
def _isotropy() -> Outcome:
    checked = 0
    for p in (2, 3, 5):
        for L in sample_lattices(p, settings.PADIQ_ISOTROPY_SAMPLES, range(1, 5),
                                 seed=settings.PADIQ_RANDOM_SEED + 1):
            if lm.is_isotropic(L, p) != isotropic_by_residues(L, p):
                return False, f"p={p}: {L}"
            checked += 1
    return True, f"{checked} random lattices"


# --- 执行 ---

def run_fixtures(names: Optional[Iterable[str]] = None) -> List[FixtureResult]:
    selected = list(names) if names else list(FIXTURES)
    unknown = [name for name in selected if name not in FIXTURES]
    if unknown:
        raise KeyError(f"unknown fixtures: {unknown}")
    results = []
    for name in selected:
        started = time.perf_counter()
        try:
            passed, detail = FIXTURES[name]()
        except Exception as exc:
            logger.error(f"fixture {name} raised", exc_info=True)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - started
        logger.info(f"fixture {name}: {'PASS' if passed else 'FAIL'} in {elapsed:.1f}s")
        results.append(FixtureResult(name=name, passed=passed, detail=detail))
    return results
