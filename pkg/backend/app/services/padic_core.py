# backend/app/services/padic_core.py
"""
p-adic 基础运算: 赋值、平方类、Hilbert 符号。

所有函数都是输入的纯函数，接受 int 或 fractions.Fraction。
0 没有赋值和平方类，一律抛出 ZeroValueError。
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple, Union

from sympy import isprime, legendre_symbol, multiplicity

from app.core.exceptions import NegativeValuationError, NotPrimeError, ZeroValueError
from app.models.square_class import SquareClass, smallest_nonresidue, unit_representatives

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


@lru_cache(maxsize=256)
def require_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not isprime(p):
        raise NotPrimeError(f"{p} is not a prime")
    return p


def ord_two(p: int) -> int:
    """ord_p 2。"""
    return 1 if p == 2 else 0


def valuation(a: Rational, p: int) -> int:
    """ord_p(a) = ord_p(分子) - ord_p(分母)。"""
    require_prime(p)
    a = Fraction(a)
    if a == 0:
        raise ZeroValueError("valuation of zero undefined")
    return int(multiplicity(p, abs(a.numerator))) - int(multiplicity(p, a.denominator))


def unit_part(a: Rational, p: int) -> Fraction:
    """a / p^{ord_p a}，是一个 p-adic 单位。"""
    return Fraction(a) / Fraction(p) ** valuation(a, p)


def unit_residue(a: Rational, p: int, k: int) -> int:
    """a 的单位部分模 p^k 的代表 (在 [0, p^k) 中)。"""
    u = unit_part(a, p)
    m = p ** k
    return u.numerator * pow(u.denominator, -1, m) % m


def _unit_class(u: Rational, p: int) -> int:
    """单位 u 所在单位平方类的规范代表元。"""
    if p == 2:
        return unit_residue(u, 2, 3)
    residue = unit_residue(u, p, 1)
    return 1 if legendre_symbol(residue, p) == 1 else smallest_nonresidue(p)


def square_class(a: Rational, p: int) -> SquareClass:
    """
    a ∈ Z_p \\ {0} 的平方类 (p, e, u)。

    只用到 a 模 4p·p^e 的信息 (局部平方定理)。
    """
    e = valuation(a, p)
    if e < 0:
        raise NegativeValuationError(f"square_class needs a p-adic integer, got {a} with ord_{p} = {e}")
    return SquareClass(prime=p, order=e, unit_rep=_unit_class(unit_part(a, p), p))


def class_of(a: Rational, p: int) -> Tuple[int, int]:
    """(ord_p a, 单位类代表)，允许负赋值。"""
    return valuation(a, p), _unit_class(unit_part(a, p), p)


def is_square(a: Rational, p: int) -> bool:
    """a 是否属于 (Q_p^×)²: 赋值为偶数且单位部分属于平方类 1。"""
    e, unit = class_of(a, p)
    return e % 2 == 0 and unit == 1


def _epsilon(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: Rational, b: Rational, p: int) -> int:
    """(a, b)_p ∈ {+1, -1}: z² = a x² + b y² 在 Q_p 上有非平凡解时为 +1。"""
    alpha, beta = valuation(a, p), valuation(b, p)
    if p == 2:
        u = unit_residue(a, 2, 3)
        v = unit_residue(b, 2, 3)
        exponent = _epsilon(u) * _epsilon(v) + alpha * _omega(v) + beta * _omega(u)
        return -1 if exponent % 2 else 1
    u = unit_residue(a, p, 1)
    v = unit_residue(b, p, 1)
    symbol = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        symbol *= legendre_symbol(u, p)
    if alpha % 2:
        symbol *= legendre_symbol(v, p)
    return symbol


def square_classes(p: int, e_max: int) -> List[SquareClass]:
    """所有 e ≤ e_max 的平方类，按 (e, u) 排序。"""
    require_prime(p)
    return [
        SquareClass(prime=p, order=e, unit_rep=u)
        for e in range(e_max + 1)
        for u in unit_representatives(p)
    ]


def parse_target(text: str) -> Fraction:
    """解析目标值: 整数、分数 "a/b" 或 "p^e*u" 形式。"""
    text = text.strip().replace(" ", "")
    if "^" in text:
        power, _, rest = text.partition("*")
        base, _, exponent = power.partition("^")
        value = Fraction(int(base)) ** int(exponent)
        return value * Fraction(rest) if rest else value
    return Fraction(text)
