# backend/app/models/jordan.py
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class BlockTag(str, Enum):
    """非正规 (improper) 二元块的类型: 双曲平面 H 或平面 A。"""
    H = "H"
    A = "A"


class JordanComponent(BaseModel):
    """
    Jordan 分解中的一个 p^s-模分量。

    正规 (proper) 分量: 对角形 ⟨p^s ε₁, …, p^s ε_r⟩，units 存放 ε_i 的规范代表元。
    非正规分量 (仅 p = 2): h_count 个 H^(2^s) 再接一个尾块 tail^(2^s)。
    """
    model_config = ConfigDict(frozen=True)

    scale_exp: int = Field(..., description="分量为 p^s-模的 s (仅 p = 2 允许 -1)")
    rank: int = Field(..., ge=1)
    proper: bool
    norm_exp: int = Field(..., description="ord_p 𝔫L_(s)")
    units: Tuple[int, ...] = Field(default=(), description="正规分量的单位代表元")
    h_count: int = Field(default=0, ge=0, description="非正规分量中 H 块的个数 (不含尾块)")
    tail: Optional[BlockTag] = Field(default=None, description="非正规分量的最后一个块")

    @model_validator(mode="after")
    def _check_content(self) -> "JordanComponent":
        if self.proper:
            if len(self.units) != self.rank or self.tail is not None or self.h_count:
                raise ValueError("proper component needs exactly one unit per dimension")
            if self.norm_exp != self.scale_exp:
                raise ValueError("proper component must have norm = scale")
        else:
            if self.units or self.tail is None:
                raise ValueError("improper component needs an H/A block list")
            if self.rank != 2 * (self.h_count + 1):
                raise ValueError("improper component rank must be 2*(h_count+1)")
            if self.norm_exp != self.scale_exp + 1:
                raise ValueError("improper component must have norm = 2*scale")
        return self

    def blocks(self) -> List[BlockTag]:
        if self.proper:
            return []
        return [BlockTag.H] * self.h_count + [self.tail]

    def signature(self) -> Tuple[int, int, bool, int]:
        """基变换下不变的 (scale_exp, rank, proper, norm_exp)。"""
        return (self.scale_exp, self.rank, self.proper, self.norm_exp)

    def determinant(self, p: int) -> Fraction:
        """分量的 Gram 行列式 (一个确定的有理代表)。"""
        scale = Fraction(p) ** self.scale_exp
        if self.proper:
            det = Fraction(1)
            for unit in self.units:
                det *= scale * unit
            return det
        det = Fraction(1)
        for tag in self.blocks():
            det *= scale * scale * (-1 if tag == BlockTag.H else 3)
        return det

    def describe(self) -> str:
        if self.proper:
            return f"s={self.scale_exp}: <" + ",".join(str(u) for u in self.units) + ">"
        return f"s={self.scale_exp}: " + " + ".join(tag.value for tag in self.blocks())


class JordanSplitting(BaseModel):
    """L ≅ L_(s_1) ⊥ … ⊥ L_(s_k)，s_i 严格递增 (分量下标即尺度指数)。"""
    model_config = ConfigDict(frozen=True)

    prime: int
    components: Tuple[JordanComponent, ...]

    @model_validator(mode="after")
    def _check_order(self) -> "JordanSplitting":
        if not self.components:
            raise ValueError("empty splitting")
        exps = [c.scale_exp for c in self.components]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError(f"scale exponents not strictly increasing: {exps}")
        if self.prime != 2 and any(not c.proper for c in self.components):
            raise ValueError("improper components only occur for p = 2")
        if self.prime != 2 and exps[0] < 0:
            raise ValueError("negative scale only occurs for p = 2")
        return self

    @computed_field
    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.components)

    @computed_field
    @property
    def t(self) -> int:
        """最大尺度指数。"""
        return self.components[-1].scale_exp

    @computed_field
    @property
    def scale_exp(self) -> int:
        return self.components[0].scale_exp

    @computed_field
    @property
    def norm_exp(self) -> int:
        return min(c.norm_exp for c in self.components)

    @computed_field
    @property
    def volume_exp(self) -> int:
        return sum(c.rank * c.scale_exp for c in self.components)

    def ranks(self) -> dict:
        return {c.scale_exp: c.rank for c in self.components}

    def is_modular(self) -> bool:
        return len(self.components) == 1

    def signature(self) -> Tuple[Tuple[int, int, bool, int], ...]:
        return tuple(c.signature() for c in self.components)

    def determinant(self) -> Fraction:
        det = Fraction(1)
        for component in self.components:
            det *= component.determinant(self.prime)
        return det

    def describe(self) -> str:
        return " | ".join(c.describe() for c in self.components)
