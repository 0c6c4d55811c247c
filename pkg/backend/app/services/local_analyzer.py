# backend/app/services/local_analyzer.py
"""
Z_p 上的局部分析: 单个值的 (本原) 表示判定、平方类谱、万有性与本原万有性判定。

表示判定是精确的: 在模 p^K 下查残差表，K 取得足够大使任何剩余解都能 Hensel 提升。
本原向量的梯度赋值 d 不超过 t + ord_p 2 (t 为 Jordan 最大指数)，
所以 K = 2(t + ord_p 2) + 1 对一切本原目标都够用；非本原目标归约为 a / p^{2j} 的本原问题。
"""
import itertools
import logging
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

from app.core.config import settings
from app.core.exceptions import (
    CertificateError,
    GapUndefinedError,
    NegativeValuationError,
    ZeroValueError,
)
from app.models.form_matrix import FormMatrix
from app.models.reports import (
    BinaryUnitProfile,
    Decision,
    GapReport,
    LocalAnalysis,
    RepVerdict,
    Rule,
    SpectrumReport,
    TraceEntry,
    Tri,
    UniversalityReport,
)
from app.models.square_class import SquareClass, unit_representatives
from .dyadic_inventory import DYADIC_UNITS, universal_family_of
from .lattice_model import (
    component_forms,
    det_square_class,
    diag,
    hasse_invariant,
    is_isotropic,
    jordan_decompose,
    norm_is_integral,
    orthogonal_sum,
    require_integral,
    scale_to_unimodular_top,
)
from .padic_core import ord_two, require_prime, square_classes, valuation
from .residue_table import reduce_mod, residue_table

logger = logging.getLogger(__name__)


# --- 单值判定 ---

def primitive_level(L: FormMatrix, p: int) -> int:
    """对一切本原目标都足够的模数指数 2(t + ord_p 2) + 1。"""
    t = jordan_decompose(L, p).t
    return max(2 * (t + ord_two(p)) + 1, 1)


def _search_level(L: FormMatrix, p: int, a: Fraction) -> int:
    k_star = 2 * valuation(2 * a, p) + 1
    return max(min(k_star, primitive_level(L, p)), 1)


def gradient_valuation(L: FormMatrix, p: int, v: Tuple[int, ...]) -> int:
    """d = min_i ord_p((G2·v)_i)。"""
    gradient = [x for x in L.apply(v) if x != 0]
    if not gradient:
        raise CertificateError(f"zero gradient at {v}")
    return min(valuation(x, p) for x in gradient)


def _certify(L: FormMatrix, p: int, a: Fraction, v: Tuple[int, ...], K: int) -> int:
    difference = L.q(v) - a
    if difference != 0 and valuation(difference, p) < K:
        raise CertificateError(f"q({v}) is not congruent to {a} mod {p}^{K}")
    d = gradient_valuation(L, p, v)
    if K < 2 * d + 1:
        raise CertificateError(f"witness {v} mod {p}^{K} has gradient valuation {d}: cannot lift")
    return d


def _primitive_search(L: FormMatrix, p: int, a: Fraction) -> Tuple[Optional[Tuple[int, ...]], int]:
    K = _search_level(L, p, a)
    table = residue_table(L, p, K)
    return table.witness(reduce_mod(a, p ** K), primitive=True), K


def decide_representation(L: FormMatrix, p: int, a, primitive: bool) -> RepVerdict:
    """a → L (primitive=False) 或 a →* L (primitive=True) 在 Z_p 上是否成立。"""
    require_prime(p)
    a = Fraction(a)
    if a == 0:
        raise ZeroValueError("use isotropy test for the target 0")
    require_integral(L, p)
    order = valuation(a, p)
    if order < 0:
        raise NegativeValuationError(f"target {a} is not a p-adic integer at p={p}")

    if primitive:
        witness, K = _primitive_search(L, p, a)
        if witness is None:
            return RepVerdict(prime=p, target=str(a), primitive=True,
                              decided=Decision.NOT_REPRESENTED, exhaustion_level=K)
        d = _certify(L, p, a, witness, K)
        return RepVerdict(prime=p, target=str(a), primitive=True, decided=Decision.REPRESENTED,
                          witness=witness, witness_level=K, gradient_valuation=d)

    for j in range(order // 2 + 1):
        reduced = a / p ** (2 * j)
        witness, K = _primitive_search(L, p, reduced)
        if witness is None:
            continue
        level = K + 2 * j
        scaled_witness = tuple(p ** j * x % p ** level for x in witness)
        d = _certify(L, p, a, scaled_witness, level)
        return RepVerdict(prime=p, target=str(a), primitive=False, decided=Decision.REPRESENTED,
                          witness=scaled_witness, witness_level=level, gradient_valuation=d)
    return RepVerdict(prime=p, target=str(a), primitive=False, decided=Decision.NOT_REPRESENTED,
                      exhaustion_level=2 * valuation(2 * a, p) + 1)


# --- 谱与万有性 ---

def spectrum(L: FormMatrix, p: int, e_max: int, primitive: bool) -> List[SquareClass]:
    """e ≤ e_max 中被 (本原) 表示的平方类。"""
    return [
        cls for cls in square_classes(p, e_max)
        if decide_representation(L, p, cls.value, primitive).represented
    ]


def spectrum_report(L: FormMatrix, p: int, e_max: int, primitive: bool) -> SpectrumReport:
    found = spectrum(L, p, e_max, primitive)
    missing = [cls for cls in square_classes(p, e_max) if cls not in found]
    return SpectrumReport(prime=p, e_max=e_max, primitive=primitive, found=tuple(found), missing=tuple(missing))


class UniversalityCheck(NamedTuple):
    universal: bool
    witnesses: Dict[str, Tuple[int, ...]]
    missing: List[SquareClass]


def is_universal_local(L: FormMatrix, p: int) -> UniversalityCheck:
    """q(L) = Z_p 当且仅当 e ∈ {0, 1} 的每个平方类都被表示 (q(L) 对乘 p² 封闭)。"""
    witnesses: Dict[str, Tuple[int, ...]] = {}
    missing: List[SquareClass] = []
    for cls in square_classes(p, 1):
        verdict = decide_representation(L, p, cls.value, primitive=False)
        if verdict.represented:
            witnesses[cls.label()] = verdict.witness
        else:
            missing.append(cls)
    return UniversalityCheck(not missing, witnesses, missing)


def represents_all_units(L: FormMatrix, p: int) -> bool:
    return all(
        decide_representation(L, p, u, primitive=False).represented
        for u in unit_representatives(p)
    )


# --- 本原万有性判定树 ---

class _Trace:
    def __init__(self):
        self.entries: List[TraceEntry] = []

    def add(self, rule: Rule, message: str) -> None:
        logger.debug(f"[{rule.value}] {message}")
        self.entries.append(TraceEntry(rule=rule, message=message))


def _modular_verdict(L: FormMatrix, p: int, trace: _Trace) -> Tri:
    component = jordan_decompose(L, p).components[0]
    n = L.n
    if p != 2:
        trace.add(Rule.UNIMODULAR_ODD, f"isotropic unimodular lattice of rank {n} at odd p")
        return Tri.YES
    if not component.proper:
        trace.add(Rule.IMPROPER_HALF_MODULAR, f"isotropic improper 1/2-modular lattice of rank {n}")
        return Tri.YES
    units = component.units
    if n == 2:
        trace.add(Rule.PROPER_UNIMODULAR_BINARY, "a proper unimodular binary lattice over Z_2 is never universal")
        return Tri.NO
    if n == 3:
        pair = next(
            ((i, j) for i, j in itertools.combinations(range(3), 2) if (units[i] + units[j]) % 4 == 0),
            None,
        )
        if pair is None:
            trace.add(Rule.UNIMODULAR_TERNARY_CRITERION,
                      f"units {units} are pairwise congruent mod 4: at most three unit classes represented")
            return Tri.NO
        trace.add(Rule.UNIMODULAR_TERNARY_CRITERION,
                  f"units {units[pair[0]]} and {units[pair[1]]} are opposite mod 4")
        return Tri.YES
    four = decide_representation(L, 2, 4, primitive=True).represented
    eight = decide_representation(L, 2, 8, primitive=True).represented
    if four and eight:
        trace.add(Rule.UNIMODULAR_QUATERNARY_FOUR_EIGHT, "4 and 8 are both primitively represented")
        return Tri.YES
    absent = "4" if not four else "8"
    trace.add(Rule.UNIMODULAR_QUATERNARY_FOUR_EIGHT, f"{absent} is not primitively represented")
    return Tri.NO


def _sufficient_split(L: FormMatrix, p: int, trace: _Trace) -> bool:
    """可见的正交分解 M ⊥ K 中有一个万有的 M，或 ⟨ε⟩ ⊥ K 且 K 表示全部单位。"""
    atoms = [atom for _, atom in component_forms(L, p)]
    indices = range(len(atoms))
    for size in range(1, len(atoms)):
        for subset in itertools.combinations(indices, size):
            summand = orthogonal_sum(*[atoms[i] for i in subset])
            if not is_universal_local(summand, p).universal:
                continue
            family = universal_family_of(summand) if p == 2 else None
            shape = f" (shape {family.label()})" if family else ""
            trace.add(Rule.UNIVERSAL_SUMMAND, f"orthogonal summand {summand} is Z_{p}-universal{shape}")
            return True
    for i, (piece, atom) in enumerate(component_forms(L, p)):
        if not piece.proper or piece.scale != 0 or len(atoms) < 2:
            continue
        rest = orthogonal_sum(*[atoms[j] for j in indices if j != i])
        if represents_all_units(rest, p):
            trace.add(Rule.UNIT_SPLIT, f"L = {atom} + K with K = {rest} representing every unit")
            return True
    return False


def is_primitively_universal_local(L: FormMatrix, p: int) -> UniversalityReport:
    """L 是否本原 Z_p-万有 (YES / NO / BOUNDED)，附证明轨迹。"""
    require_prime(p)
    splitting = jordan_decompose(L, p)
    trace = _Trace()
    base = dict(prime=p, form=str(L), splitting=splitting.describe())

    if splitting.scale_exp < 0:
        trace.add(Rule.HALF_SCALED, f"scale 2^{splitting.scale_exp}: leading 1/2-modular component")

    if not norm_is_integral(L, p) or splitting.norm_exp != 0:
        reason = "norm not contained in Z_p" if splitting.norm_exp < 0 else f"norm is {p}^{splitting.norm_exp}Z_{p}"
        trace.add(Rule.NORM_NOT_UNIT, f"{reason}: 1 is not represented")
        return UniversalityReport(**base, universal=False, primitively_universal=Tri.NO, trace=tuple(trace.entries))

    universal = is_universal_local(L, p)
    e_max = splitting.t + settings.PADIQ_EMAX_PADDING
    found = spectrum(L, p, e_max, primitive=True)
    missing = [cls for cls in square_classes(p, e_max) if cls not in found]
    base.update(
        universal=universal.universal,
        universal_witnesses=universal.witnesses,
        universal_missing=tuple(universal.missing),
        found=tuple(found),
        missing=tuple(missing),
    )

    def report(verdict: Tri, bounded_depth: Optional[int] = None) -> UniversalityReport:
        return UniversalityReport(**base, primitively_universal=verdict, e_max=bounded_depth,
                                  trace=tuple(trace.entries))

    if not is_isotropic(L, p):
        witness = f"; class {missing[0].label()} is not primitively represented" if missing else ""
        trace.add(Rule.ANISOTROPIC, f"anisotropic over Z_{p}{witness}")
        return report(Tri.NO)

    if L.n >= 5:
        if universal.universal:
            if splitting.is_modular():
                trace.add(Rule.UNIMODULAR_RANK_FIVE, f"modular lattice of rank {L.n}")
            trace.add(Rule.RANK_FIVE_UNIVERSAL, f"rank {L.n} and Z_{p}-universal")
            return report(Tri.YES)
        labels = ", ".join(cls.label() for cls in universal.missing)
        trace.add(Rule.RANK_FIVE_UNIVERSAL, f"rank {L.n} but not Z_{p}-universal: misses {labels}")
        return report(Tri.NO)

    if splitting.is_modular():
        return report(_modular_verdict(L, p, trace))

    if _sufficient_split(L, p, trace):
        return report(Tri.YES)
    if missing:
        trace.add(Rule.NECESSARY_CLASS_MISSING, f"class {missing[0].label()} is not primitively represented")
        return report(Tri.NO)
    trace.add(Rule.BOUNDED_SEARCH, f"every class with e <= {e_max} is primitively represented")
    return report(Tri.BOUNDED, e_max)


# --- 各向异性 ---

def isotropic_by_residues(L: FormMatrix, p: int) -> bool:
    """用残差表判定各向同性: 缩放后在模 p^{t+3} 下是否存在本原零点。"""
    scaled_form, _ = scale_to_unimodular_top(L, p)
    horizon = jordan_decompose(scaled_form, p).t + 3
    return residue_table(scaled_form, p, horizon).has_primitive_zero()


def anisotropic_gap(L: FormMatrix, p: int) -> GapReport:
    """q*(L) ∩ p^l Z_p = ∅ 的界 l = t + 3，以及残差搜索得到的最小 l。"""
    require_prime(p)
    if is_isotropic(L, p):
        raise GapUndefinedError(f"gap undefined: {L} is isotropic over Z_{p}")
    scaled_form, shift = scale_to_unimodular_top(L, p)
    t = jordan_decompose(scaled_form, p).t
    bound = t + 3
    empirical = next(
        (level for level in range(1, bound + 1)
         if not residue_table(scaled_form, p, level).has_primitive_zero()),
        bound + 1,
    )
    logger.info(f"anisotropic gap of {L} at p={p}: bound {bound}, empirical {empirical}")
    return GapReport(prime=p, scale_shift=shift, t=t, bound=bound, empirical_min=empirical)


# --- 单位类计数与二元格 ---

def unit_classes(L: FormMatrix, p: int) -> List[int]:
    """L 所表示的单位平方类代表。"""
    return [u for u in unit_representatives(p) if decide_representation(L, p, u, primitive=False).represented]


def unit_classes_with_small_complement(epsilon: int, K: FormMatrix, p: int) -> List[int]:
    """
    ⟨ε⟩ ⊥ K 所表示的单位类，要求 𝔫K ⊆ 2pZ_p；结果至多两个类 (奇素数时一个)。
    """
    if valuation(epsilon, p) != 0:
        raise ValueError(f"{epsilon} is not a unit at p={p}")
    norm = jordan_decompose(K, p).norm_exp
    if not norm_is_integral(K, p) or norm < 1 + ord_two(p):
        raise ValueError(f"complement norm must lie in 2pZ_{p}")
    return unit_classes(orthogonal_sum(diag(epsilon), K), p)


def binary_unit_profile(L: FormMatrix) -> BinaryUnitProfile:
    """
    Z_2 上正规幺模二元格: dL ≡ 3 (mod 4) 时表示全部单位、不表示 2Z_2^×；
    dL ≡ 1 (mod 4) 时所表示的单位恰为一个模 4 同余类。
    """
    splitting = jordan_decompose(L, 2)
    component = splitting.components[0]
    if L.n != 2 or not splitting.is_modular() or not component.proper or component.scale_exp != 0:
        raise ValueError("binary_unit_profile needs a proper unimodular binary lattice over Z_2")
    units = tuple(unit_classes(L, 2))
    two_units = [u for u in DYADIC_UNITS if decide_representation(L, 2, 2 * u, primitive=False).represented]
    return BinaryUnitProfile(
        det_mod4=det_square_class(L, 2).unit_rep % 4,
        unit_classes=units,
        represents_two_units=bool(two_units),
        universal=len(units) == 4 and len(two_units) == 4,
    )


def analyze_local(L: FormMatrix, p: int) -> LocalAnalysis:
    """Jordan 分解、判别式平方类、Hasse 不变量、各向同性与本原万有性判定。"""
    return LocalAnalysis(
        prime=p,
        splitting=jordan_decompose(L, p),
        determinant_class=det_square_class(L, p),
        hasse=hasse_invariant(L, p),
        isotropic=is_isotropic(L, p),
        report=is_primitively_universal_local(L, p),
    )
