# backend/app/models/form_matrix.py
from fractions import Fraction
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator
from sympy import Matrix


class FormMatrix(BaseModel):
    """
    整二次型 / 格的唯一数据源: 加倍 Gram 矩阵 G2 = 2·Gram。

    q(v) = vᵀ G2 v / 2，B(v, w) = vᵀ G2 w / 2。
    G2 的对角元为偶数时 q 在 Z 上取整数值；half 标记存在奇数元素
    (非经典整形，例如 Ĥ、Â)。
    """
    model_config = ConfigDict(frozen=True)

    gram2: Tuple[Tuple[int, ...], ...] = Field(..., description="加倍 Gram 矩阵 G2 (对称、非退化)")

    @field_validator("gram2")
    @classmethod
    def _check_shape(cls, rows: Tuple[Tuple[int, ...], ...]) -> Tuple[Tuple[int, ...], ...]:
        n = len(rows)
        if n == 0:
            raise ValueError("empty form")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"G2 not symmetric at ({i},{j})")
        if Matrix(rows).det(method="bareiss") == 0:
            raise ValueError("singular form")
        return rows

    @computed_field
    @property
    def half(self) -> bool:
        """True iff some G2 entry is odd, i.e. the form is not classically integral."""
        return any(entry % 2 for row in self.gram2 for entry in row)

    @property
    def n(self) -> int:
        return len(self.gram2)

    def q2(self, v: Sequence[int]) -> int:
        """vᵀ G2 v = 2·q(v) (整数)。"""
        total = 0
        for i, row in enumerate(self.gram2):
            if v[i] == 0:
                continue
            total += v[i] * sum(row[j] * v[j] for j in range(self.n))
        return total

    def q(self, v: Sequence[int]) -> Fraction:
        return Fraction(self.q2(v), 2)

    def apply(self, v: Sequence[int]) -> List[int]:
        """G2·v，即 q 的梯度。"""
        return [sum(row[j] * v[j] for j in range(self.n)) for row in self.gram2]

    def gram(self) -> List[List[Fraction]]:
        """真正的 Gram 矩阵 G2/2 (有理数)。"""
        return [[Fraction(entry, 2) for entry in row] for row in self.gram2]

    def det2(self) -> int:
        return int(Matrix(self.gram2).det(method="bareiss"))

    def determinant(self) -> Fraction:
        """dL = det(G2) / 2^n。"""
        return Fraction(self.det2(), 2 ** self.n)

    def is_diagonal(self) -> bool:
        return all(self.gram2[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def classically_integral(self) -> bool:
        return not self.half

    def __str__(self) -> str:
        if self.is_diagonal():
            entries = [str(Fraction(self.gram2[i][i], 2)) for i in range(self.n)]
            return "<" + ",".join(entries) + ">"
        return "G2=" + str([list(row) for row in self.gram2])
