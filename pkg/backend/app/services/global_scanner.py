# backend/app/services/global_scanner.py
"""
全局扫描: 正定型在 [1, B] 内表示的整数、几乎 (本原) 万有性判定、Theorem-3 型判别式判据。

枚举采用配方分解 q(x) = Σ d_i (x_i + Σ_{j>i} r_ij x_j)² 上的深度优先搜索 (Fincke–Pohst)，
按首坐标切片，可交给线程池并行；合并按切片顺序进行，结果与单线程完全一致。
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

from sympy import factorint

from app.core.config import settings
from app.core.exceptions import (
    NonIntegralLatticeError,
    NotPositiveDefiniteError,
    OutOfScopeError,
    RepresentedTargetError,
)
from app.models.form_matrix import FormMatrix
from app.models.reports import (
    GlobalVerdict,
    Hypothesis,
    HypothesisStatus,
    ProgressionWitness,
    Rule,
    ScanReport,
    Theorem3Report,
    Tri,
    UniversalityReport,
)
from app.models.square_class import SquareClass
from .lattice_model import jordan_decompose, require_integral
from .local_analyzer import decide_representation, is_primitively_universal_local
from .padic_core import square_classes
from .residue_table import reduce_mod

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


# --- 正定性与配方 ---

class CompletedSquares(NamedTuple):
    pivots: List[Fraction]
    coefficients: List[List[Fraction]]


def completed_squares(L: FormMatrix) -> Optional[CompletedSquares]:
    """对称消元 G = Rᵀ D R；某个主元 ≤ 0 时返回 None。"""
    A = [row[:] for row in L.gram()]
    n = L.n
    pivots: List[Fraction] = []
    R = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        d = A[i][i]
        if d <= 0:
            return None
        pivots.append(d)
        for j in range(i + 1, n):
            R[i][j] = A[i][j] / d
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= d * R[i][j] * R[i][k]
    return CompletedSquares(pivots, R)


def is_positive_definite(L: FormMatrix) -> bool:
    return completed_squares(L) is not None


def _require_positive_definite(L: FormMatrix) -> CompletedSquares:
    squares = completed_squares(L)
    if squares is None:
        logger.warning(f"rejecting {L}: not positive definite")
        raise NotPositiveDefiniteError(f"{L} is not positive definite")
    return squares


# --- 枚举 ---

def _candidates(center: Fraction, room: Fraction, pivot: Fraction) -> range:
    """满足 pivot·(x - center)² ≤ room 的整数 x 的一个 (略宽的) 范围。"""
    radius = math.isqrt(math.floor(room / pivot)) + 1
    return range(math.floor(center) - radius, math.ceil(center) + radius + 1)


class _SliceScan:
    """首坐标固定时的枚举结果: 值 → 第一个见证。"""

    def __init__(self, L: FormMatrix, squares: CompletedSquares, bound: int):
        self.form = L
        self.squares = squares
        self.bound = bound

    def run(self, prefix: Tuple[int, ...]) -> Tuple[Dict[int, Vector], Dict[int, Vector]]:
        n = self.form.n
        x = [0] * n
        for offset, value in enumerate(prefix):
            x[n - 1 - offset] = value
        found: Dict[int, Vector] = {}
        primitive: Dict[int, Vector] = {}
        level = n - 1 - len(prefix)
        used = sum(self._term(i, x) for i in range(level + 1, n))
        if used <= self.bound:
            self._descend(level, x, Fraction(self.bound) - used, found, primitive)
        return found, primitive

    def _center(self, i: int, x: List[int]) -> Fraction:
        row = self.squares.coefficients[i]
        return -sum((row[j] * x[j] for j in range(i + 1, len(x)) if x[j]), Fraction(0))

    def _term(self, i: int, x: List[int]) -> Fraction:
        return self.squares.pivots[i] * (x[i] - self._center(i, x)) ** 2

    def _descend(self, i: int, x: List[int], room: Fraction, found, primitive) -> None:
        if i == 0:
            self._leaf(x, room, found, primitive)
            return
        pivot = self.squares.pivots[i]
        center = self._center(i, x)
        for value in _candidates(center, room, pivot):
            spent = pivot * (value - center) ** 2
            if spent > room:
                continue
            x[i] = value
            self._descend(i - 1, x, room - spent, found, primitive)
        x[i] = 0

    def _leaf(self, x: List[int], room: Fraction, found, primitive) -> None:
        G2 = self.form.gram2
        n = self.form.n
        # 整数增量: q2(v) = q2(v') + 2·x_0·(G2 v')_0 + x_0²·G2_00，v' 为 x_0 = 0 的向量
        x[0] = 0
        base = sum(G2[i][j] * x[i] * x[j] for i in range(n) for j in range(n) if x[i] and x[j])
        linear = sum(G2[0][j] * x[j] for j in range(1, n) if x[j])
        square = G2[0][0]
        common = 0
        for value in x[1:]:
            common = math.gcd(common, value)
        doubled_bound = 2 * self.bound
        for value in _candidates(self._center(0, x), room, self.squares.pivots[0]):
            q2 = base + value * (2 * linear + value * square)
            if q2 <= 0 or q2 > doubled_bound:
                continue
            q = q2 // 2
            if q not in found:
                x[0] = value
                found[q] = tuple(x)
            if q not in primitive and math.gcd(common, value) == 1:
                x[0] = value
                primitive[q] = tuple(x)
        x[0] = 0


def _slices(L: FormMatrix, squares: CompletedSquares, bound: int) -> List[Tuple[int, ...]]:
    if L.n == 1:
        return [()]
    pivot = squares.pivots[-1]
    return [(value,) for value in _candidates(Fraction(0), Fraction(bound), pivot)
            if pivot * value * value <= bound]


def enumerate_values(L: FormMatrix, bound: int, threads: Optional[int] = None) -> ScanReport:
    """[1, bound] 中被 L (本原) 表示的整数，附见证向量。"""
    if bound < 1:
        raise ValueError("scan bound must be at least 1")
    require_integral(L, 2)
    squares = _require_positive_definite(L)
    threads = threads or settings.PADIQ_THREADS
    scanner = _SliceScan(L, squares, bound)
    prefixes = _slices(L, squares, bound)
    logger.info(f"scanning {L} up to {bound}: {len(prefixes)} slices on {threads} thread(s)")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(scanner.run, prefixes))
    else:
        results = [scanner.run(prefix) for prefix in prefixes]

    witnesses: Dict[int, Vector] = {}
    primitive_witnesses: Dict[int, Vector] = {}
    for found, primitive in results:
        for value, vector in found.items():
            witnesses.setdefault(value, vector)
        for value, vector in primitive.items():
            primitive_witnesses.setdefault(value, vector)

    everything = range(1, bound + 1)
    return ScanReport(
        form=str(L),
        bound=bound,
        represented=tuple(sorted(witnesses)),
        primitively_represented=tuple(sorted(primitive_witnesses)),
        excluded=tuple(k for k in everything if k not in witnesses),
        primitive_excluded=tuple(k for k in everything if k not in primitive_witnesses),
        witnesses=dict(sorted(witnesses.items())),
        primitive_witnesses=dict(sorted(primitive_witnesses.items())),
    )


# --- 几乎万有性 ---

def progression_witness(L: FormMatrix, p: int, a, primitive: bool) -> ProgressionWitness:
    """若 a 在 Z_p 上不被 (本原) 表示，则整个剩余类 a mod p^K 都不被表示。"""
    verdict = decide_representation(L, p, a, primitive)
    if verdict.represented:
        raise RepresentedTargetError(
            f"{a} is {'primitively ' if primitive else ''}represented by {L} over Z_{p}"
        )
    modulus = p ** verdict.exhaustion_level
    return ProgressionWitness(
        prime=p, target=verdict.target, primitive=primitive,
        residue=reduce_mod(Fraction(a), modulus), modulus=modulus,
    )


def relevant_primes(L: FormMatrix) -> Tuple[int, ...]:
    """整除 2·det 的素数；其余素数处 L_p 是秩 ≥ 3 的幺模格。"""
    doubled = 2 * L.determinant()
    size = max(abs(doubled.numerator), doubled.denominator)
    if size > settings.PADIQ_MAX_DETERMINANT:
        raise OutOfScopeError(
            f"determinant {L.determinant()} exceeds the factoring limit {settings.PADIQ_MAX_DETERMINANT}"
        )
    primes = set(factorint(abs(doubled.numerator))) | set(factorint(doubled.denominator))
    primes.add(2)
    return tuple(sorted(primes))


def _first_missing_class(L: FormMatrix, p: int, report: UniversalityReport) -> Optional[SquareClass]:
    if report.missing:
        return report.missing[0]
    # padding 较小时各向异性缺口可能超出报告的深度
    horizon = jordan_decompose(L, p).t + 4
    for cls in square_classes(p, horizon):
        if not decide_representation(L, p, cls.value, primitive=True).represented:
            return cls
    return None


def almost_universality_verdict(L: FormMatrix) -> GlobalVerdict:
    """汇总各素数处的局部判定，给出几乎万有 / 几乎本原万有的判定。"""
    if L.n <= 3:
        raise OutOfScopeError(f"almost universality needs rank at least 4, got rank {L.n}")
    require_integral(L, 2)
    _require_positive_definite(L)
    primes = relevant_primes(L)
    per_prime = {p: is_primitively_universal_local(L, p) for p in primes}
    notes = [f"primes outside {list(primes)}: L_p is unimodular of rank {L.n} and primitively universal"]

    witnesses: List[ProgressionWitness] = []
    for p, report in per_prime.items():
        for cls in report.universal_missing:
            witnesses.append(progression_witness(L, p, cls.value, primitive=False))
        if report.primitively_universal == Tri.NO:
            cls = _first_missing_class(L, p, report)
            if cls is not None:
                witnesses.append(progression_witness(L, p, cls.value, primitive=True))

    verdicts = [report.primitively_universal for report in per_prime.values()]
    if Tri.NO in verdicts:
        primitive_verdict = Tri.NO
    elif Tri.BOUNDED in verdicts:
        primitive_verdict = Tri.UNDETERMINED
        bounded = [p for p, report in per_prime.items() if report.primitively_universal == Tri.BOUNDED]
        notes.append(f"local search bounded at primes {bounded}")
    else:
        primitive_verdict = Tri.YES

    if not all(report.universal for report in per_prime.values()):
        universal_verdict = Tri.NO
    elif L.n >= 5 or primitive_verdict == Tri.YES:
        universal_verdict = Tri.YES
    else:
        universal_verdict = Tri.UNDETERMINED
        notes.append("quaternary form locally universal everywhere: almost universality not decided")

    for p, report in per_prime.items():
        if Rule.ANISOTROPIC in report.fired():
            notes.append(f"anisotropic over Z_{p}")

    # 有限个例外只对足够大的整数成立，常数 N 不可计算
    notes.append("YES verdicts concern all sufficiently large integers")
    logger.info(f"verdict for {L}: universal {universal_verdict.value}, primitive {primitive_verdict.value}")
    return GlobalVerdict(
        form=str(L),
        relevant_primes=primes,
        per_prime=per_prime,
        almost_universal=universal_verdict,
        almost_primitively_universal=primitive_verdict,
        progression_witnesses=tuple(witnesses),
        notes=tuple(notes),
    )


# --- 判别式判据 ---

def _odd_value_hypothesis(L: FormMatrix) -> Hypothesis:
    name = "represents-odd"
    if jordan_decompose(L, 2).norm_exp != 0:
        return Hypothesis(name=name, status=HypothesisStatus.FAILS,
                          detail="norm of L_2 is not Z_2: every value is even")
    search_bound = settings.PADIQ_ODD_SEARCH_BOUND
    scan = enumerate_values(L, search_bound)
    odd = next((k for k in scan.represented if k % 2), None)
    if odd is None:
        return Hypothesis(name=name, status=HypothesisStatus.UNVERIFIED_AT_BOUND,
                          detail=f"no odd value up to {search_bound}")
    return Hypothesis(name=name, status=HypothesisStatus.HOLDS,
                      detail=f"q{scan.witnesses[odd]} = {odd}")


def theorem3_check(L: FormMatrix) -> Theorem3Report:
    """
    检查: 秩 ≥ 4；表示某个奇数；对每个素数 p，p^{n-2} ∤ det；n ≥ 5 或 n = 4 且 det 为偶数。
    全部成立时该型几乎本原万有，并与各素数处的局部判定交叉核对。
    """
    if not L.classically_integral():
        raise NonIntegralLatticeError(f"{L} is not classically integral")
    _require_positive_definite(L)
    n = L.n
    det = L.determinant()
    if det.denominator != 1:
        raise NonIntegralLatticeError(f"{L} has non-integral determinant {det}")
    det = int(det)
    if abs(det) > settings.PADIQ_MAX_DETERMINANT:
        raise OutOfScopeError(f"determinant {det} exceeds the factoring limit")

    hypotheses = [
        Hypothesis(
            name="rank-at-least-four",
            status=HypothesisStatus.HOLDS if n >= 4 else HypothesisStatus.FAILS,
            detail=f"rank {n}",
        ),
        _odd_value_hypothesis(L),
    ]
    offenders = [p for p, e in sorted(factorint(det).items()) if n >= 2 and e >= n - 2]
    hypotheses.append(Hypothesis(
        name="discriminant-power-free",
        status=HypothesisStatus.FAILS if offenders else HypothesisStatus.HOLDS,
        detail=(f"p^{n - 2} divides {det} for p in {offenders}" if offenders
                else f"no p^{n - 2} divides {det}"),
    ))
    rank_ok = n >= 5 or (n == 4 and det % 2 == 0)
    hypotheses.append(Hypothesis(
        name="rank-five-or-even-quaternary",
        status=HypothesisStatus.HOLDS if rank_ok else HypothesisStatus.FAILS,
        detail=f"rank {n}, determinant {det}",
    ))

    applicable = all(h.status == HypothesisStatus.HOLDS for h in hypotheses)
    cross_check = None
    if applicable:
        verdict = almost_universality_verdict(L)
        cross_check = all(r.primitively_universal == Tri.YES for r in verdict.per_prime.values())
        if not cross_check:
            logger.warning(f"local reports for {L} disagree with the discriminant criterion")
    return Theorem3Report(
        form=str(L),
        hypotheses=tuple(hypotheses),
        applicable=applicable,
        verdict=Tri.YES if applicable else Tri.UNDETERMINED,
        cross_check=cross_check,
    )
