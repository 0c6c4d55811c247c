# backend/app/services/residue_oracle.py
"""
朴素的剩余类穷举 (numpy 向量化)，作为残差表与表示判定的独立对照。

逐层构造 S_k = {v mod p^k : q(v) ≡ a (mod p^k)}: S_{k+1} 中的向量都是 S_k 中向量的提升，
不做任何 Hensel 剪枝。只适合小秩、小模数。
"""
import itertools
import logging
from fractions import Fraction
from typing import FrozenSet

import numpy as np

from app.core.exceptions import ZeroValueError
from app.models.form_matrix import FormMatrix
from .lattice_model import require_integral
from .padic_core import require_prime, valuation
from .residue_table import reduce_mod

logger = logging.getLogger(__name__)

# 每层允许保留的最大解数；提升按块进行
MAX_ROWS = 4_000_000
# 单层提升前的候选数上限 (解数 × p^n)
MAX_LIFTED = 16_000_000
CHUNK_ROWS = 65_536


def _reduced_gram(L: FormMatrix, modulus: int) -> np.ndarray:
    # G2 模 2·p^M 足以确定 q 模 p^M
    return np.array(L.gram2, dtype=np.int64) % (2 * modulus)


def _q_mod(G2: np.ndarray, vectors: np.ndarray, modulus: int) -> np.ndarray:
    doubled = np.einsum("ri,ij,rj->r", vectors, G2, vectors)
    return (doubled // 2) % modulus


def _digits(p: int, n: int) -> np.ndarray:
    return np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)


def solutions(L: FormMatrix, p: int, a: int, M: int) -> np.ndarray:
    """全部 v mod p^M (每个分量在 [0, p^M) 中) 使 q(v) ≡ a (mod p^M)。"""
    require_prime(p)
    require_integral(L, p)
    modulus = p ** M
    G2 = _reduced_gram(L, modulus)
    digits = _digits(p, L.n)
    current = np.zeros((1, L.n), dtype=np.int64)
    for k in range(M):
        step = p ** k
        level = p ** (k + 1)
        if len(current) * len(digits) > MAX_LIFTED:
            raise MemoryError(f"residue search mod {p}^{M} would lift {len(current) * len(digits)} candidates")
        survivors = []
        for start in range(0, len(current), CHUNK_ROWS):
            block = current[start:start + CHUNK_ROWS]
            lifted = (block[:, None, :] + step * digits[None, :, :]).reshape(-1, L.n)
            survivors.append(lifted[_q_mod(G2, lifted, level) == a % level])
        current = np.concatenate(survivors)
        if len(current) > MAX_ROWS:
            raise MemoryError(f"residue search mod {p}^{M} keeps more than {MAX_ROWS} solutions")
        if not len(current):
            break
    return current


def naive_represents(L: FormMatrix, p: int, a, primitive: bool, M: int) -> bool:
    """模 p^M 下是否存在 (本原) 解。"""
    a = Fraction(a)
    if a == 0:
        raise ZeroValueError("use isotropy test for the target 0")
    found = solutions(L, p, reduce_mod(a, p ** M), M)
    if primitive:
        found = found[np.any(found % p != 0, axis=1)]
    return bool(len(found))


def oracle_level(a, p: int) -> int:
    """对照检查使用的模数指数 K* + 1，K* = 2·ord_p(2a) + 1。"""
    return 2 * valuation(2 * Fraction(a), p) + 2


def value_set(L: FormMatrix, p: int, K: int, primitive: bool) -> FrozenSet[int]:
    """{q(v) mod p^K}，v 取遍 (Z/p^K)^n (primitive=True 时只取本原向量)。"""
    require_prime(p)
    require_integral(L, p)
    modulus = p ** K
    if modulus ** L.n > MAX_ROWS:
        raise MemoryError(f"value set mod {p}^{K} in rank {L.n} is too large for exhaustive search")
    G2 = _reduced_gram(L, modulus)
    vectors = np.array(list(itertools.product(range(modulus), repeat=L.n)), dtype=np.int64)
    if primitive:
        vectors = vectors[np.any(vectors % p != 0, axis=1)]
    values = np.unique(_q_mod(G2, vectors, modulus))
    return frozenset(int(x) for x in values)
