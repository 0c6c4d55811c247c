# backend/app/services/residue_table.py
"""
模 p^K 的值集表。

q(μv) = μ² q(v)，所以 {q(v) mod p^K} 是若干 "格子" 的并:
格子 (e, r) 由赋值 e < K 与单位部分的类 r 组成 (奇素数按 Legendre 符号，
p = 2 按单位部分模 2^{min(K-e, 3)})；(K, 0) 为零格子。
值集在 Jordan 块上做动态规划，每个 (格子, 是否本原) 都带一个见证向量。
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from sympy import legendre_symbol, sqrt_mod

from app.models.form_matrix import FormMatrix
from app.models.square_class import smallest_nonresidue
from .lattice_model import JordanPiece, jordan_pieces, require_integral

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
State = Tuple[Cell, bool]


def reduce_mod(x: Fraction, m: int) -> int:
    """p-整有理数模 m 的整数代表。"""
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m


def _ord(x: int, p: int, cap: int) -> int:
    e = 0
    while e < cap and x % p == 0:
        x //= p
        e += 1
    return e


def _unit_precision(p: int, K: int, e: int) -> int:
    """格子 (e, r) 中 r 的模数。"""
    if p == 2:
        return 2 ** min(K - e, 3)
    return p


def cell_of(x: int, p: int, K: int) -> Cell:
    modulus = p ** K
    x %= modulus
    if x == 0:
        return (K, 0)
    e = _ord(x, p, K)
    u = x // p ** e
    if p == 2:
        return (e, u % _unit_precision(p, K, e))
    return (e, 1 if legendre_symbol(u % p, p) == 1 else smallest_nonresidue(p))


def cell_rep(cell: Cell, p: int) -> int:
    e, r = cell
    return p ** e * r


@lru_cache(maxsize=None)
def all_cells(p: int, K: int) -> Tuple[Cell, ...]:
    cells: List[Cell] = []
    for e in range(K):
        if p == 2:
            cells.extend((e, r) for r in range(1, _unit_precision(p, K, e), 2))
        else:
            cells.extend([(e, 1), (e, smallest_nonresidue(p))])
    cells.append((K, 0))
    return tuple(cells)


def cell_members(cell: Cell, p: int, K: int) -> List[int]:
    """格子中的全部剩余 (测试与朴素比对用)。"""
    e, _ = cell
    if e == K:
        return [0]
    return [x for x in range(p ** e, p ** K, p ** e) if cell_of(x, p, K) == cell]


def unit_sqrt(ratio: int, p: int, j: int) -> int:
    """模 p^j 的单位平方根 (ratio 已知是单位平方)。"""
    if j <= 0:
        return 1
    modulus = p ** j
    ratio %= modulus
    if ratio == 1:
        return 1
    root = sqrt_mod(ratio, modulus)
    if root is None:
        raise ArithmeticError(f"{ratio} is not a square mod {p}^{j}")
    return int(root)


def rescale_factor(value: int, cell: Cell, p: int, K: int) -> int:
    """ρ 使得 ρ² · value ≡ rep(cell) (mod p^K)。value 必须属于 cell。"""
    e, r = cell
    if e == K:
        return 1
    modulus = p ** (K - e)
    u = (value // p ** e) % modulus
    return unit_sqrt(r * pow(u, -1, modulus), p, K - e)


@lru_cache(maxsize=None)
def _sum_results(p: int, K: int, c1: Cell, c2: Cell) -> Tuple[Tuple[Cell, int], ...]:
    """
    rep(c1) + μ² rep(c2) (μ 取遍单位) 落入的格子，每个格子配一个 μ。
    """
    zero = (K, 0)
    if c1 == zero:
        return ((c2, 1),)
    if c2 == zero:
        return ((c1, 1),)
    modulus = p ** K
    rep1, rep2 = cell_rep(c1, p), cell_rep(c2, p)
    if c1[0] != c2[0]:
        return ((cell_of(rep1 + rep2, p, K), 1),)
    e = c1[0]
    J = K - e
    r1, r2 = c1[1], c2[1]
    h = min(J, 3 if p == 2 else 1)
    inverse_r2 = pow(r2, -1, p ** J)
    results: Dict[Cell, int] = {}
    # w = r1 + r2·s，s 为单位平方；s 模 p^h 决定 w 能否继续为 0 mod p^h
    squares_h = sorted({x * x % p ** h for x in range(p ** h) if x % p})
    for s0 in squares_h:
        w0 = (r1 + r2 * s0) % p ** h
        if w0 == 0:
            targets = [c for c in all_cells(p, K) if c[0] >= e + h]
        else:
            f = _ord(w0, p, h)
            width = min(J, f + (3 if p == 2 else 1))
            targets = sorted({
                cell_of(p ** e * (w0 + p ** h * t), p, K)
                for t in range(p ** max(width - h, 0))
            })
        for target in targets:
            if target in results:
                continue
            want = (cell_rep(target, p) // p ** e) % p ** J
            s = (want - r1) * inverse_r2 % p ** J
            mu = unit_sqrt(s, p, J)
            assert cell_of(rep1 + mu * mu * rep2, p, K) == target
            results[target] = mu % modulus
    return tuple(sorted(results.items()))


def _normalized(value: int, witness: Tuple[int, ...], p: int, K: int) -> Tuple[Cell, Tuple[int, ...]]:
    """把见证缩放到 q(w) ≡ rep(cell) (mod p^K)，动态规划按代表元组合格子。"""
    modulus = p ** K
    cell = cell_of(value, p, K)
    rho = rescale_factor(value % modulus, cell, p, K)
    return cell, tuple(rho * x % modulus for x in witness)


@lru_cache(maxsize=None)
def _rank_one_cells(p: int, K: int, c: int) -> Tuple[Tuple[State, Tuple[int, ...]], ...]:
    """⟨c⟩ (c 为整数代表) 的 (格子, 本原) → 见证。"""
    modulus = p ** K
    out: Dict[State, Tuple[int, ...]] = {((K, 0), False): (0,)}
    j = 0
    while True:
        x = p ** j % modulus
        cell, witness = _normalized(c * x * x, (x,), p, K)
        out.setdefault((cell, j == 0), witness)
        if cell == (K, 0):
            break
        j += 1
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _binary_cells(K: int, a: int, b2: int, c: int) -> Tuple[Tuple[State, Tuple[int, ...]], ...]:
    """p = 2 的非正规二元块 q(x, y) = a x² + b2 xy + c y² (系数已约化为整数，b2 = 2B(e1, e2))。"""
    modulus = 2 ** K
    # q = 2^{s+1} N(x, y)，N 模 2^r 只依赖于 x, y 模 2^r
    r = max(K - _ord(b2, 2, K), 1)
    points = [(1, y) for y in range(2 ** r)] + [(x, 1) for x in range(0, 2 ** r, 2)]
    out: Dict[State, Tuple[int, ...]] = {((K, 0), False): (0, 0)}
    primitive_values: Dict[Cell, Tuple[int, int]] = {}
    for x, y in points:
        value = (a * x * x + b2 * x * y + c * y * y) % modulus
        primitive_values.setdefault(cell_of(value, 2, K), (x, y))
    for _, (x, y) in sorted(primitive_values.items()):
        cell, witness = _normalized(a * x * x + b2 * x * y + c * y * y, (x, y), 2, K)
        out.setdefault((cell, True), witness)
        j = 1
        while 2 ** j < modulus:
            value = (a * x * x + b2 * x * y + c * y * y) * 4 ** j % modulus
            cell, witness = _normalized(value, (x * 2 ** j, y * 2 ** j), 2, K)
            out.setdefault((cell, False), witness)
            if value == 0:
                break
            j += 1
    return tuple(sorted(out.items()))


def _piece_cells(piece: JordanPiece, p: int, K: int) -> Tuple[Tuple[State, Tuple[int, ...]], ...]:
    modulus = p ** K
    if piece.proper:
        return _rank_one_cells(p, K, reduce_mod(piece.gram[0][0], modulus))
    (a, b), (_, c) = piece.gram
    return _binary_cells(K, reduce_mod(a, modulus), reduce_mod(2 * b, modulus), reduce_mod(c, modulus))


class ResidueTable:
    """格 L 在模 p^K 下的值集 (按格子与本原性索引)，见证为原坐标下的整数向量。"""

    def __init__(self, L: FormMatrix, p: int, K: int):
        require_integral(L, p)
        if K < 1:
            raise ValueError("residue level must be at least 1")
        self.form = L
        self.prime = p
        self.level = K
        self.modulus = p ** K
        pieces = jordan_pieces(L, p)
        split = self._run(pieces)
        self._basis = self._basis_matrix(pieces)
        self.states: Dict[State, Tuple[int, ...]] = {
            key: self._to_original(witness) for key, witness in split.items()
        }
        logger.debug(f"residue table {L} mod {p}^{K}: {len(self.states)} states")

    def _run(self, pieces: Sequence[JordanPiece]) -> Dict[State, List[int]]:
        p, K, modulus = self.prime, self.level, self.modulus
        states: Dict[State, List[int]] = {((K, 0), False): []}
        for piece in pieces:
            piece_cells = _piece_cells(piece, p, K)
            new_states: Dict[State, List[int]] = {}
            for (c1, prim1), w1 in sorted(states.items()):
                for (c2, prim2), w2 in piece_cells:
                    for target, mu in _sum_results(p, K, c1, c2):
                        key = (target, prim1 or prim2)
                        if key in new_states:
                            continue
                        value = (cell_rep(c1, p) + mu * mu * cell_rep(c2, p)) % modulus
                        rho = rescale_factor(value, target, p, K)
                        new_states[key] = [rho * x % modulus for x in w1] + [rho * mu * y % modulus for y in w2]
            states = new_states
        return states

    def _basis_matrix(self, pieces: Sequence[JordanPiece]) -> List[List[int]]:
        columns = [vector for piece in pieces for vector in piece.vectors]
        return [[reduce_mod(x, self.modulus) for x in column] for column in columns]

    def _to_original(self, split_witness: Sequence[int]) -> Tuple[int, ...]:
        n = self.form.n
        v = [0] * n
        for coefficient, column in zip(split_witness, self._basis):
            if coefficient:
                for i in range(n):
                    v[i] += coefficient * column[i]
        return tuple(x % self.modulus for x in v)

    def witness(self, value: int, primitive: bool) -> Optional[Tuple[int, ...]]:
        """q(v) ≡ value (mod p^K) 的见证 (primitive=True 时要求本原)，不存在时返回 None。"""
        p, K, modulus = self.prime, self.level, self.modulus
        value %= modulus
        cell = cell_of(value, p, K)
        stored = self.states.get((cell, True))
        if stored is None and not primitive:
            stored = self.states.get((cell, False))
        if stored is None:
            return None
        if cell == (K, 0):
            return stored
        # rep(cell) → value: ρ² · rep ≡ value
        e = cell[0]
        j = K - e
        rho = unit_sqrt((value // p ** e) * pow(cell[1], -1, p ** j) % p ** j, p, j)
        return tuple(rho * x % modulus for x in stored)

    def has_primitive_zero(self) -> bool:
        return ((self.level, 0), True) in self.states

    def values(self, primitive: bool) -> FrozenSet[int]:
        """全部 (本原) 可达剩余。"""
        cells = {cell for (cell, prim) in self.states if prim or not primitive}
        return frozenset(x for cell in cells for x in cell_members(cell, self.prime, self.level))


@lru_cache(maxsize=1024)
def residue_table(L: FormMatrix, p: int, K: int) -> ResidueTable:
    return ResidueTable(L, p, K)
