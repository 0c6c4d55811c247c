# backend/app/services/lattice_model.py
"""
格模型: 构造器、Z_p 上的 Jordan 分解，以及判别式 / Hasse 不变量 / 各向同性。

格由加倍 Gram 矩阵 G2 给出 (FormMatrix)。Jordan 分解在有理基向量上做对称消元，
所有系数都是 p-整的，因此基变换矩阵属于 GL_n(Z_(p))。
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Sequence, Tuple

from pydantic import ValidationError
from sympy import Matrix

from app.core.exceptions import NonIntegralLatticeError, SingularFormError
from app.models.form_matrix import FormMatrix
from app.models.jordan import BlockTag, JordanComponent, JordanSplitting
from app.models.square_class import SignedSquareClass
from .padic_core import (
    Rational,
    class_of,
    hilbert_symbol,
    is_square,
    require_prime,
    unit_part,
    valuation,
)

logger = logging.getLogger(__name__)

Vector = List[Fraction]


# --- 构造器 ---

def make_form(rows: Sequence[Sequence[int]]) -> FormMatrix:
    """由加倍 Gram 矩阵构造 FormMatrix；退化矩阵抛出 SingularFormError。"""
    rows = tuple(tuple(int(x) for x in row) for row in rows)
    if rows and all(len(row) == len(rows) for row in rows):
        if Matrix(rows).det(method="bareiss") == 0:
            raise SingularFormError("singular form")
    try:
        return FormMatrix(gram2=rows)
    except ValidationError as exc:
        raise SingularFormError(str(exc.errors()[0]["msg"])) from exc


def diag(*entries: Rational) -> FormMatrix:
    """⟨a₁, …, a_n⟩；要求 2a_i 为整数。"""
    n = len(entries)
    rows = [[0] * n for _ in range(n)]
    for i, a in enumerate(entries):
        doubled = 2 * Fraction(a)
        if doubled.denominator != 1:
            raise NonIntegralLatticeError(f"diagonal entry {a} has 2a not integral")
        rows[i][i] = int(doubled)
    return make_form(rows)


def H() -> FormMatrix:
    """双曲平面 (0 1 / 1 0)。"""
    return make_form([[0, 2], [2, 0]])


def A() -> FormMatrix:
    """平面 (2 1 / 1 2)。"""
    return make_form([[4, 2], [2, 4]])


def Hhat() -> FormMatrix:
    """Ĥ = H^(1/2)，q(x, y) = xy。"""
    return make_form([[0, 1], [1, 0]])


def Ahat() -> FormMatrix:
    """Â = A^(1/2)，q(x, y) = x² + xy + y²。"""
    return make_form([[2, 1], [1, 2]])


def orthogonal_sum(*forms: FormMatrix) -> FormMatrix:
    n = sum(form.n for form in forms)
    rows = [[0] * n for _ in range(n)]
    offset = 0
    for form in forms:
        for i in range(form.n):
            for j in range(form.n):
                rows[offset + i][offset + j] = form.gram2[i][j]
        offset += form.n
    return make_form(rows)


def scaled(L: FormMatrix, c: Rational) -> FormMatrix:
    """L^(c): Gram 矩阵乘以有理数 c。结果的 G2 必须仍是整数矩阵。"""
    c = Fraction(c)
    if c == 0:
        raise SingularFormError("scaling by zero")
    rows = []
    for row in L.gram2:
        new_row = []
        for entry in row:
            value = entry * c
            if value.denominator != 1:
                raise NonIntegralLatticeError(f"scaling by {c} leaves a non-integral doubled Gram entry")
            new_row.append(int(value))
        rows.append(new_row)
    return make_form(rows)


def conjugate(L: FormMatrix, U: Sequence[Sequence[int]]) -> FormMatrix:
    """Uᵀ G2 U (U 为整数矩阵)。"""
    result = Matrix(U).T * Matrix(L.gram2) * Matrix(U)
    return make_form(result.tolist())


def norm_is_integral(L: FormMatrix, p: int) -> bool:
    """𝔫L ⊆ Z_p 当且仅当 p 为奇数或 G2 的对角元全为偶数。"""
    return p != 2 or all(L.gram2[i][i] % 2 == 0 for i in range(L.n))


def require_integral(L: FormMatrix, p: int) -> None:
    if not norm_is_integral(L, p):
        logger.warning(f"rejecting {L}: norm not contained in Z_{p}")
        raise NonIntegralLatticeError(f"non-integral lattice: norm of {L} not contained in Z_{p}")


# --- Jordan 分解 ---

class JordanPiece(NamedTuple):
    """Jordan 分解中的一块: 秩 1 (正规) 或秩 2 (非正规)，附带原坐标下的基向量。"""
    scale: int
    proper: bool
    vectors: Tuple[Tuple[Fraction, ...], ...]
    gram: Tuple[Tuple[Fraction, ...], ...]


def _bilinear(G: List[List[Fraction]], x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        row = G[i]
        total += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj != 0)
    return total


def _gram_of(G: List[List[Fraction]], vectors: List[Vector]) -> List[List[Fraction]]:
    return [[_bilinear(G, a, b) for b in vectors] for a in vectors]


def _add(x: Vector, y: Vector, c: Fraction = Fraction(1)) -> Vector:
    return [a + c * b for a, b in zip(x, y)]


@lru_cache(maxsize=512)
def jordan_pieces(L: FormMatrix, p: int) -> Tuple[JordanPiece, ...]:
    """
    把 L 拆成秩 1 / 秩 2 的正交块，尺度指数单调不减。

    每步取 Gram 矩阵中赋值最小的元素 m: 若对角元达到 m 则分出秩 1 块；
    否则 (p = 2) 分出一个非正规二元块。p = 2 时若同一尺度上已经分出过正规块，
    把它与该二元块合并 (w' = w + v_j + v_k) 再分出 w'，保证每个尺度要么全正规要么全非正规。
    """
    require_prime(p)
    G = L.gram()
    active: List[Vector] = [[Fraction(int(i == j)) for j in range(L.n)] for i in range(L.n)]
    pieces: List[JordanPiece] = []
    while active:
        M = _gram_of(G, active)
        k = len(active)
        m = min(valuation(M[i][j], p) for i in range(k) for j in range(k) if M[i][j] != 0)
        pivot = next((i for i in range(k) if M[i][i] != 0 and valuation(M[i][i], p) == m), None)
        if pivot is not None:
            v = active.pop(pivot)
            a = M[pivot][pivot]
            active = [_add(x, v, -_bilinear(G, x, v) / a) for x in active]
            pieces.append(JordanPiece(m, True, (tuple(v),), ((a,),)))
            continue
        j, l = next(
            (i, jj) for i in range(k) for jj in range(i + 1, k)
            if M[i][jj] != 0 and valuation(M[i][jj], p) == m
        )
        if p != 2:
            active[j] = _add(active[j], active[l])
            continue
        if pieces and pieces[-1].proper and pieces[-1].scale == m:
            w = list(pieces.pop().vectors[0])
            active.insert(0, _add(_add(w, active[j]), active[l]))
            continue
        u, v = active[j], active[l]
        a, b, c = M[j][j], M[j][l], M[l][l]
        det = a * c - b * b
        rest = []
        for idx, x in enumerate(active):
            if idx in (j, l):
                continue
            bx_u, bx_v = M[idx][j], M[idx][l]
            coef_u = (c * bx_u - b * bx_v) / det
            coef_v = (a * bx_v - b * bx_u) / det
            rest.append(_add(_add(x, u, -coef_u), v, -coef_v))
        active = rest
        pieces.append(JordanPiece(m, False, (tuple(u), tuple(v)), ((a, b), (b, c))))
    logger.debug(f"Jordan pieces of {L} at p={p}: {[(pc.scale, pc.proper) for pc in pieces]}")
    return tuple(pieces)


def _component(p: int, scale: int, group: List[JordanPiece]) -> JordanComponent:
    if all(piece.proper for piece in group):
        units = tuple(class_of(piece.gram[0][0] / Fraction(p) ** scale, p)[1] for piece in group)
        return JordanComponent(scale_exp=scale, rank=len(group), proper=True, norm_exp=scale, units=units)
    if any(piece.proper for piece in group):
        raise RuntimeError(f"mixed proper/improper pieces at scale {scale}")
    k = len(group)
    normalized = Fraction(1)
    for piece in group:
        (a, b), (_, c) = piece.gram
        normalized *= (a * c - b * b) / Fraction(4) ** scale
    _, unit = class_of(normalized * (-1) ** k, 2)
    tail = BlockTag.H if unit == 1 else BlockTag.A
    return JordanComponent(
        scale_exp=scale, rank=2 * k, proper=False, norm_exp=scale + 1, h_count=k - 1, tail=tail
    )


@lru_cache(maxsize=512)
def jordan_decompose(L: FormMatrix, p: int) -> JordanSplitting:
    """L ≅ L_(s_1) ⊥ … ⊥ L_(s_k)，分量按尺度指数递增。"""
    pieces = jordan_pieces(L, p)
    components = []
    scales = sorted({piece.scale for piece in pieces})
    for scale in scales:
        group = [piece for piece in pieces if piece.scale == scale]
        components.append(_component(p, scale, group))
    return JordanSplitting(prime=p, components=tuple(components))


def reassemble(splitting: JordanSplitting) -> FormMatrix:
    """由 Jordan 分解的规范内容重新拼出一个 (与 L 在 Z_p 上等距的) 整型。"""
    p = splitting.prime
    blocks = []
    for component in splitting.components:
        scale = Fraction(p) ** component.scale_exp
        if component.proper:
            blocks.extend(diag(scale * unit) for unit in component.units)
            continue
        for tag in component.blocks():
            base = H() if tag == BlockTag.H else A()
            blocks.append(scaled(base, scale))
    return orthogonal_sum(*blocks)


# --- 不变量 ---

def det_square_class(L: FormMatrix, p: int) -> SignedSquareClass:
    """dL 作为 Q_p^× 的平方类 (保留符号)。"""
    det = L.determinant()
    order, unit = class_of(det, p)
    return SignedSquareClass(prime=p, order=order, unit_rep=unit, sign=1 if det > 0 else -1)


def diagonalize(L: FormMatrix) -> List[Fraction]:
    """有理对称消元得到 ⟨a₁, …, a_n⟩。对角全为 0 时先做 v_i ← v_i + v_j。"""
    G = L.gram()
    active: List[Vector] = [[Fraction(int(i == j)) for j in range(L.n)] for i in range(L.n)]
    entries: List[Fraction] = []
    while active:
        M = _gram_of(G, active)
        k = len(active)
        pivot = next((i for i in range(k) if M[i][i] != 0), None)
        if pivot is None:
            i, j = next((i, j) for i in range(k) for j in range(i + 1, k) if M[i][j] != 0)
            active[i] = _add(active[i], active[j])
            continue
        v = active.pop(pivot)
        a = M[pivot][pivot]
        active = [_add(x, v, -_bilinear(G, x, v) / a) for x in active]
        entries.append(a)
    return entries


def hasse_invariant(L: FormMatrix, p: int) -> int:
    """S_p = Π_{i<j} (a_i, a_j)_p。"""
    entries = diagonalize(L)
    result = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            result *= hilbert_symbol(entries[i], entries[j], p)
    return result


def is_isotropic(L: FormMatrix, p: int) -> bool:
    """底层 Q_p 空间是否各向同性 (按秩分情形的结构判据)。"""
    require_prime(p)
    n = L.n
    d = L.determinant()
    if n == 1:
        return False
    if n == 2:
        return is_square(-d, p)
    if n == 3:
        return hasse_invariant(L, p) == hilbert_symbol(-1, -d, p)
    if n == 4:
        return not (is_square(d, p) and hasse_invariant(L, p) != hilbert_symbol(-1, -1, p))
    return True


def scale_to_unimodular_top(L: FormMatrix, p: int) -> Tuple[FormMatrix, int]:
    """把 L 乘以 p 的幂使 𝔰L = Z_p；返回 (缩放后的格, 乘上的指数)。"""
    shift = -jordan_decompose(L, p).scale_exp
    if shift == 0:
        return L, 0
    return scaled(L, Fraction(p) ** shift), shift


def unit_of(value: Rational, p: int) -> int:
    """value 的单位部分所在的平方类代表。"""
    return class_of(unit_part(value, p), p)[1]


def component_forms(L: FormMatrix, p: int) -> List[Tuple[JordanPiece, FormMatrix]]:
    """每个 Jordan 块对应的规范小格 (秩 1 为 ⟨p^s ε⟩，秩 2 为 H 或 A 的缩放)。"""
    result = []
    for piece in jordan_pieces(L, p):
        scale = Fraction(p) ** piece.scale
        if piece.proper:
            result.append((piece, diag(scale * unit_of(piece.gram[0][0], p))))
            continue
        (a, b), (_, c) = piece.gram
        _, unit = class_of(-(a * c - b * b), 2)
        base = H() if unit == 1 else A()
        result.append((piece, scaled(base, scale)))
    return result

