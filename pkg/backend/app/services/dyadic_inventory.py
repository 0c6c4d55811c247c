# backend/app/services/dyadic_inventory.py
"""
Z_2 上的形状族清单。

每个形状族形如 [Â ⊥] ⟨2^{e_1} ε_1, …, 2^{e_k} ε_k⟩，ε_i 取遍单位代表 {1,3,5,7}，
并对全部单位组声明一个表示性质 (表示全部单位 / 全部 2·单位 / 万有 / 反例)。
"""
import itertools
import logging
from enum import Enum
from typing import Iterator, List, NamedTuple, Optional, Tuple

from app.models.form_matrix import FormMatrix
from .lattice_model import Ahat, component_forms, diag, orthogonal_sum

logger = logging.getLogger(__name__)

DYADIC_UNITS = (1, 3, 5, 7)


class FamilyKind(str, Enum):
    REPRESENTS_UNITS = "represents-units"
    REPRESENTS_TWO_UNITS = "represents-two-units"
    UNIVERSAL = "universal"
    MISSES_UNITS = "misses-units"
    MISSES_TWO_UNITS = "misses-two-units"


class ShapeFamily(NamedTuple):
    name: str
    kind: FamilyKind
    exponents: Tuple[int, ...]
    with_ahat: bool = False

    def build(self, units: Tuple[int, ...]) -> FormMatrix:
        blocks = [Ahat()] if self.with_ahat else []
        blocks.extend(diag(2 ** e * u) for e, u in zip(self.exponents, units))
        return orthogonal_sum(*blocks)

    def members(self) -> Iterator[Tuple[Tuple[int, ...], FormMatrix]]:
        for units in itertools.product(DYADIC_UNITS, repeat=len(self.exponents)):
            yield units, self.build(units)

    def signature(self) -> Tuple[bool, Tuple[int, ...]]:
        return self.with_ahat, tuple(sorted(self.exponents))

    def label(self) -> str:
        parts = ",".join(f"{2 ** e}e{i + 1}" if e else f"e{i + 1}" for i, e in enumerate(self.exponents))
        return ("Ahat+" if self.with_ahat else "") + f"<{parts}>"


def _family(name: str, kind: FamilyKind, lambdas: Tuple[int, ...], head: Tuple[int, ...], with_ahat: bool = False):
    return [ShapeFamily(f"{name}[{2 ** lam}]", kind, head + (lam,), with_ahat) for lam in lambdas]


INVENTORY: Tuple[ShapeFamily, ...] = tuple(
    _family("units-a", FamilyKind.REPRESENTS_UNITS, (0, 2), (0, 1))
    + _family("units-b", FamilyKind.REPRESENTS_UNITS, (0, 2), (0, 0, 0))
    + [ShapeFamily("units-c", FamilyKind.REPRESENTS_UNITS, (0, 1, 1, 1))]
    + [ShapeFamily("two-units-a", FamilyKind.REPRESENTS_TWO_UNITS, (0, 0, 0))]
    + _family("two-units-b", FamilyKind.REPRESENTS_TWO_UNITS, (1, 3), (0, 1))
    + _family("two-units-c", FamilyKind.REPRESENTS_TWO_UNITS, (0, 2), (0, 1, 2))
    + _family("two-units-d", FamilyKind.REPRESENTS_TWO_UNITS, (1, 2, 3), (1,), with_ahat=True)
    + _family("universal-a", FamilyKind.UNIVERSAL, (0, 1, 2), (0, 0, 0))
    + _family("universal-b", FamilyKind.UNIVERSAL, (1, 2, 3), (0, 0, 1))
    + _family("universal-c", FamilyKind.UNIVERSAL, (1, 2), (0, 1, 1))
    + _family("universal-d", FamilyKind.UNIVERSAL, (2, 3), (0, 1, 2))
    + [ShapeFamily("universal-e", FamilyKind.UNIVERSAL, (0,), with_ahat=True)]
    + _family("universal-f", FamilyKind.UNIVERSAL, (1, 2, 3), (1,), with_ahat=True)
    + [
        ShapeFamily("misses-units", FamilyKind.MISSES_UNITS, (0, 1, 1)),
        ShapeFamily("misses-two-units-a", FamilyKind.MISSES_TWO_UNITS, (0, 1, 2)),
        ShapeFamily("misses-two-units-b", FamilyKind.MISSES_TWO_UNITS, (1,), with_ahat=True),
    ]
)


def families(kind: Optional[FamilyKind] = None) -> List[ShapeFamily]:
    return [family for family in INVENTORY if kind is None or family.kind == kind]


def lattice_signature(L: FormMatrix) -> Optional[Tuple[bool, Tuple[int, ...]]]:
    """
    L 的 2-adic 形状 (是否含 Â, 对角块指数)。
    只在 L ≅ [Â ⊥] 对角型 时有定义，否则返回 None。
    """
    with_ahat = False
    exponents = []
    for piece, atom in component_forms(L, 2):
        if piece.proper:
            exponents.append(piece.scale)
            continue
        if piece.scale != -1 or with_ahat or atom.gram2[0][0] == 0:
            return None
        with_ahat = True
    return with_ahat, tuple(sorted(exponents))


def universal_family_of(L: FormMatrix) -> Optional[ShapeFamily]:
    """若 L 的形状属于万有形状族，返回该族。"""
    signature = lattice_signature(L)
    if signature is None:
        return None
    for family in families(FamilyKind.UNIVERSAL):
        if family.signature() == signature:
            return family
    return None

