# backend/app/models/square_class.py
from functools import lru_cache
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    """奇素数 p 的最小正二次非剩余 Δ。"""
    squares = {x * x % p for x in range(1, p)}
    for candidate in range(2, p):
        if candidate not in squares:
            return candidate
    raise ValueError(f"no quadratic non-residue mod {p}")


def unit_representatives(p: int) -> Tuple[int, ...]:
    """单位平方类的规范代表元: p = 2 时为 (1,3,5,7)，奇素数时为 (1, Δ)。"""
    if p == 2:
        return (1, 3, 5, 7)
    return (1, smallest_nonresidue(p))


class SquareClass(BaseModel):
    """
    Z_p 中非零元素的平方类 p^e · u · (Z_p^×)²。
    """
    model_config = ConfigDict(frozen=True)

    prime: int = Field(..., description="素数 p")
    order: int = Field(..., ge=0, description="赋值 e = ord_p(a)")
    unit_rep: int = Field(..., description="单位部分的规范代表元")

    @model_validator(mode="after")
    def _check_unit_rep(self) -> "SquareClass":
        if self.unit_rep not in unit_representatives(self.prime):
            raise ValueError(
                f"unit_rep {self.unit_rep} is not canonical for p={self.prime} "
                f"(expected one of {unit_representatives(self.prime)})"
            )
        return self

    @property
    def value(self) -> int:
        """代表元 p^e · u。"""
        return self.prime ** self.order * self.unit_rep

    def sort_key(self) -> Tuple[int, int]:
        return (self.order, self.unit_rep)

    def label(self) -> str:
        if self.order == 0:
            return str(self.unit_rep)
        return f"{self.prime}^{self.order}*{self.unit_rep}"


class SignedSquareClass(BaseModel):
    """
    Q_p^× 中的平方类，保留有理代表的符号 (判别式用)。赋值可以为负 (½ 缩放的格)。
    """
    model_config = ConfigDict(frozen=True)

    prime: int
    order: int = Field(..., description="赋值，可为负")
    unit_rep: int
    sign: int = Field(..., description="有理行列式的符号 (+1 或 -1)")

    @model_validator(mode="after")
    def _check(self) -> "SignedSquareClass":
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.unit_rep not in unit_representatives(self.prime):
            raise ValueError(f"unit_rep {self.unit_rep} is not canonical for p={self.prime}")
        return self

    def same_class(self, other: "SignedSquareClass") -> bool:
        """Q_p 平方类相等 (符号不是 p-adic 不变量)。"""
        return (self.prime, self.order, self.unit_rep) == (other.prime, other.order, other.unit_rep)
