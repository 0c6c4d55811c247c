# backend/app/models/reports.py
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .jordan import JordanSplitting
from .square_class import SignedSquareClass, SquareClass


class Decision(str, Enum):
    REPRESENTED = "REPRESENTED"
    NOT_REPRESENTED = "NOT_REPRESENTED"


class Tri(str, Enum):
    """判定结果。BOUNDED / UNDETERMINED 表示在给定深度内未能给出证明。"""
    YES = "YES"
    NO = "NO"
    BOUNDED = "BOUNDED"
    UNDETERMINED = "UNDETERMINED"


class Rule(str, Enum):
    """证明轨迹中的规则标识 (稳定，供 JSON 与测试使用)。"""
    NORM_NOT_UNIT = "norm-not-unit"
    ANISOTROPIC = "anisotropic"
    RANK_FIVE_UNIVERSAL = "rank-five-universal"
    UNIMODULAR_ODD = "unimodular-odd"
    IMPROPER_HALF_MODULAR = "improper-half-modular"
    PROPER_UNIMODULAR_BINARY = "proper-unimodular-binary"
    UNIMODULAR_TERNARY_CRITERION = "unimodular-ternary-criterion"
    UNIMODULAR_QUATERNARY_FOUR_EIGHT = "unimodular-quaternary-four-eight"
    UNIMODULAR_RANK_FIVE = "unimodular-rank-five"
    UNIVERSAL_SUMMAND = "universal-summand"
    UNIT_SPLIT = "unit-split"
    NECESSARY_CLASS_MISSING = "necessary-class-missing"
    BOUNDED_SEARCH = "bounded-search"
    HALF_SCALED = "half-scaled"


class TraceEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule: Rule
    message: str


class RepVerdict(BaseModel):
    """
    单个目标值 a 在 Z_p 上的 (本原) 表示判定。

    REPRESENTED 附带模 p^K 的见证向量 v 与 Hensel 数据 d = min ord_p((G2·v)_i)，
    满足 K ≥ 2d+1；NOT_REPRESENTED 附带穷举层级 K (模 p^K 无解)。
    """
    model_config = ConfigDict(frozen=True)

    prime: int
    target: str = Field(..., description="目标值 a (有理数的字符串形式)")
    primitive: bool
    decided: Decision
    witness: Optional[Tuple[int, ...]] = None
    witness_level: Optional[int] = Field(default=None, description="见证成立的模数指数 K")
    gradient_valuation: Optional[int] = Field(default=None, description="d = min_i ord_p((G2 v)_i)")
    exhaustion_level: Optional[int] = Field(default=None, description="无解的模数指数")

    @model_validator(mode="after")
    def _check_certificate(self) -> "RepVerdict":
        if self.decided == Decision.REPRESENTED:
            if self.witness is None or self.witness_level is None or self.gradient_valuation is None:
                raise ValueError("REPRESENTED verdict needs a witness with lifting data")
            if self.witness_level < 2 * self.gradient_valuation + 1:
                raise ValueError("witness level below the lifting bound 2d+1")
            if self.primitive and all(x % self.prime == 0 for x in self.witness):
                raise ValueError("primitive witness has no unit coordinate")
        else:
            if self.exhaustion_level is None or self.witness is not None:
                raise ValueError("NOT_REPRESENTED verdict needs an exhaustion level and no witness")
        return self

    @property
    def represented(self) -> bool:
        return self.decided == Decision.REPRESENTED


class SpectrumReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    prime: int
    e_max: int
    primitive: bool
    found: Tuple[SquareClass, ...]
    missing: Tuple[SquareClass, ...]


class UniversalityReport(BaseModel):
    """Z_p 上的万有性 / 本原万有性判定及证明轨迹。"""
    model_config = ConfigDict(frozen=True)

    prime: int
    form: str
    splitting: str = Field(..., description="Jordan 分解的文字描述")
    universal: bool
    universal_witnesses: Dict[str, Tuple[int, ...]] = Field(default_factory=dict, description="类标签 → 见证向量")
    universal_missing: Tuple[SquareClass, ...] = ()
    primitively_universal: Tri
    e_max: Optional[int] = None
    trace: Tuple[TraceEntry, ...] = ()
    found: Tuple[SquareClass, ...] = ()
    missing: Tuple[SquareClass, ...] = ()

    @model_validator(mode="after")
    def _check_consistency(self) -> "UniversalityReport":
        if self.primitively_universal == Tri.YES and not self.universal:
            raise ValueError("primitively universal but not universal")
        if self.primitively_universal in (Tri.YES, Tri.NO) and not self.trace:
            raise ValueError("decided verdict without a proof trace")
        if self.primitively_universal == Tri.BOUNDED and self.e_max is None:
            raise ValueError("BOUNDED verdict must state its depth")
        if self.primitively_universal == Tri.UNDETERMINED:
            raise ValueError("local verdicts are YES, NO or BOUNDED")
        return self

    def fired(self) -> List[Rule]:
        return [entry.rule for entry in self.trace]


class GapReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    prime: int
    scale_shift: int = Field(..., description="分析前乘上的 p 的幂次 (使 𝔰L = Z_p)")
    t: int = Field(..., description="缩放后 Jordan 分解的最大指数")
    bound: int
    empirical_min: int

    @model_validator(mode="after")
    def _check_bound(self) -> "GapReport":
        if self.empirical_min > self.bound:
            raise ValueError(f"empirical gap {self.empirical_min} exceeds bound {self.bound}")
        return self


class ScanReport(BaseModel):
    """正定型在 [1, B] 内 (本原) 表示的整数。"""
    model_config = ConfigDict(frozen=True)

    form: str
    bound: int = Field(..., ge=1)
    represented: Tuple[int, ...]
    primitively_represented: Tuple[int, ...]
    excluded: Tuple[int, ...]
    primitive_excluded: Tuple[int, ...]
    witnesses: Dict[int, Tuple[int, ...]] = Field(default_factory=dict)
    primitive_witnesses: Dict[int, Tuple[int, ...]] = Field(default_factory=dict)

    @computed_field
    @property
    def represented_count(self) -> int:
        return len(self.represented)

    @model_validator(mode="after")
    def _check_sets(self) -> "ScanReport":
        if not set(self.primitively_represented) <= set(self.represented):
            raise ValueError("primitively represented values must be represented")
        if not set(self.excluded) <= set(self.primitive_excluded):
            raise ValueError("excluded set must lie inside the primitive excluded set")
        return self


class ProgressionWitness(BaseModel):
    """模 modulus 同余于 residue 的整数均不被 (本原) 表示。"""
    model_config = ConfigDict(frozen=True)

    prime: int
    target: str
    primitive: bool
    residue: int
    modulus: int


class GlobalVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    form: str
    relevant_primes: Tuple[int, ...]
    per_prime: Dict[int, UniversalityReport]
    almost_universal: Tri
    almost_primitively_universal: Tri
    progression_witnesses: Tuple[ProgressionWitness, ...] = ()
    notes: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_verdicts(self) -> "GlobalVerdict":
        if self.almost_primitively_universal == Tri.YES and any(
            report.primitively_universal != Tri.YES for report in self.per_prime.values()
        ):
            raise ValueError("almost primitively universal needs every local verdict YES")
        if self.almost_primitively_universal == Tri.NO:
            local_failure = any(r.primitively_universal == Tri.NO for r in self.per_prime.values())
            if not (self.progression_witnesses or local_failure):
                raise ValueError("NO verdict must carry a progression witness or a local failure")
        if self.almost_primitively_universal == Tri.BOUNDED or self.almost_universal == Tri.BOUNDED:
            raise ValueError("global verdicts are YES, NO or UNDETERMINED")
        return self


class HypothesisStatus(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNVERIFIED_AT_BOUND = "unverified-at-bound"


class Hypothesis(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    status: HypothesisStatus
    detail: str


class Theorem3Report(BaseModel):
    """判别式条件下几乎本原万有的充分判据的检查结果。"""
    model_config = ConfigDict(frozen=True)

    form: str
    hypotheses: Tuple[Hypothesis, ...]
    applicable: bool
    verdict: Tri
    cross_check: Optional[bool] = Field(default=None, description="各素数的本原万有判定是否全为 YES")

    @model_validator(mode="after")
    def _check(self) -> "Theorem3Report":
        all_hold = all(h.status == HypothesisStatus.HOLDS for h in self.hypotheses)
        if self.applicable != all_hold:
            raise ValueError("applicable must mean every hypothesis holds")
        if self.applicable and self.verdict != Tri.YES:
            raise ValueError("applicable report concludes YES")
        return self

    def failed(self) -> List[str]:
        return [h.name for h in self.hypotheses if h.status != HypothesisStatus.HOLDS]


class FixtureResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str


class BinaryUnitProfile(BaseModel):
    """Z_2 上正规幺模二元格的单位表示情况。"""
    model_config = ConfigDict(frozen=True)

    det_mod4: int
    unit_classes: Tuple[int, ...]
    represents_two_units: bool
    universal: bool


class LocalAnalysis(BaseModel):
    """单个素数处的完整局部分析 (命令行 analyze 的输出单元)。"""
    model_config = ConfigDict(frozen=True)

    prime: int
    splitting: JordanSplitting
    determinant_class: SignedSquareClass
    hasse: int = Field(..., description="Hasse 不变量 Π_{i<j} (a_i, a_j)_p")
    isotropic: bool
    report: UniversalityReport
