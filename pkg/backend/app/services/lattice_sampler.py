# backend/app/services/lattice_sampler.py
"""
随机格生成 (性质测试用)。

先按 Jordan 块随机拼出一个整格 (指数 ≤ 3)，再用随机幺模整数矩阵共轭，
使结果不再是块对角形。同一个种子总是得到同一组格。
"""
import logging
import random
from typing import Iterator, List, Optional

from app.core.config import settings
from app.models.form_matrix import FormMatrix
from .lattice_model import A, H, Ahat, Hhat, conjugate, diag, orthogonal_sum, scaled
from .padic_core import require_prime

logger = logging.getLogger(__name__)

MAX_EXPONENT = 3


def _random_unit(rng: random.Random, p: int) -> int:
    while True:
        u = rng.randrange(1, 4 * p)
        if u % p:
            return u


def _random_block(rng: random.Random, p: int, room: int) -> FormMatrix:
    """一个随机 Jordan 块，秩不超过 room。"""
    if p == 2 and room >= 2 and rng.random() < 0.4:
        e = rng.randint(-1, MAX_EXPONENT - 1)
        if e == -1:
            return rng.choice([Hhat, Ahat])()
        return scaled(rng.choice([H, A])(), 2 ** e)
    return diag(p ** rng.randint(0, MAX_EXPONENT) * _random_unit(rng, p))


def _random_unimodular(rng: random.Random, n: int, steps: int) -> List[List[int]]:
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return U
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        for row in U:
            row[j] += c * row[i]
    return U


def random_lattice(rng: random.Random, p: int, n: int, conjugation_steps: int = 3) -> FormMatrix:
    """秩 n、在 p 处整的随机格。"""
    require_prime(p)
    blocks: List[FormMatrix] = []
    rank = 0
    while rank < n:
        block = _random_block(rng, p, n - rank)
        blocks.append(block)
        rank += block.n
    rng.shuffle(blocks)
    base = orthogonal_sum(*blocks)
    return conjugate(base, _random_unimodular(rng, n, conjugation_steps))


def sample_lattices(
    p: int,
    count: int,
    ranks: range,
    seed: Optional[int] = None,
) -> Iterator[FormMatrix]:
    """确定性的随机格序列，秩在 ranks 中均匀选取。"""
    seed = settings.PADIQ_RANDOM_SEED if seed is None else seed
    rng = random.Random(f"{seed}:{p}")
    logger.debug(f"sampling {count} lattices at p={p}, ranks {list(ranks)}, seed {seed}")
    for _ in range(count):
        yield random_lattice(rng, p, rng.choice(ranks))
