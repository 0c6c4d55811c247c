# backend/app/tests/services/test_residue_table.py
from fractions import Fraction

import pytest

from app.core.exceptions import NonIntegralLatticeError
from app.services import lattice_model as lm
from app.services.residue_oracle import value_set
from app.services.residue_table import (
    ResidueTable,
    all_cells,
    cell_members,
    cell_of,
    cell_rep,
    reduce_mod,
    residue_table,
)

# (格, p, K)，规模保证朴素穷举在百万行以内
CASES = [
    (lm.diag(1, 1), 2, 3),
    (lm.diag(1, 3), 2, 4),
    (lm.Ahat(), 2, 3),
    (lm.H(), 2, 3),
    (lm.A(), 2, 4),
    (lm.diag(1, 2, 4), 2, 4),
    (lm.orthogonal_sum(lm.Hhat(), lm.diag(2)), 2, 3),
    (lm.orthogonal_sum(lm.diag(1), lm.scaled(lm.A(), 2)), 2, 4),
    (lm.diag(1, 3), 3, 2),
    (lm.diag(3, 9), 3, 3),
    (lm.diag(1, 1, 3), 3, 2),
    (lm.diag(2, 5), 5, 2),
    # 单位不是格子代表元的块
    (lm.diag(3), 5, 2),
    (lm.diag(9), 5, 2),
    (lm.diag(15), 3, 3),
    (lm.diag(13, 7), 2, 5),
    (lm.A(), 2, 5),
    (lm.diag(1, 1, 1, 3), 5, 2),
]


def _case_id(case):
    L, p, K = case
    return f"{L}-p{p}-K{K}"


# --- Cells ---

def test_cells_partition_the_residues():
    for p, K in ((2, 4), (3, 3), (5, 2)):
        members = [x for cell in all_cells(p, K) for x in cell_members(cell, p, K)]
        assert sorted(members) == list(range(p ** K))


def test_cell_of_examples():
    assert cell_of(0, 2, 3) == (3, 0)
    assert cell_of(12, 2, 5) == (2, 3)
    assert cell_of(6, 2, 3) == (1, 3)
    assert cell_of(7, 3, 2) == (0, 1)
    assert cell_of(5, 3, 2) == (0, 2)


# --- Value sets against exhaustive search ---

@pytest.mark.parametrize("case", CASES, ids=[_case_id(c) for c in CASES])
@pytest.mark.parametrize("primitive", [False, True])
def test_value_set_matches_exhaustive_search(case, primitive):
    L, p, K = case
    assert residue_table(L, p, K).values(primitive) == value_set(L, p, K, primitive)


@pytest.mark.parametrize("case", CASES, ids=[_case_id(c) for c in CASES])
def test_witnesses_hit_their_residue(case):
    L, p, K = case
    table = residue_table(L, p, K)
    modulus = p ** K
    for primitive in (False, True):
        for value in sorted(table.values(primitive)):
            w = table.witness(value, primitive)
            assert w is not None
            assert reduce_mod(L.q(w), modulus) == value
            if primitive:
                assert any(x % p for x in w)


def test_missing_values_have_no_witness():
    table = residue_table(lm.Ahat(), 2, 3)
    assert table.witness(2, primitive=True) is None
    assert table.witness(4, primitive=False) is not None


def test_primitive_zero():
    assert residue_table(lm.H(), 2, 5).has_primitive_zero()
    assert not residue_table(lm.diag(1, 1), 3, 1).has_primitive_zero()
    assert residue_table(lm.diag(1, 1), 5, 4).has_primitive_zero()


def test_table_rejects_bad_input():
    with pytest.raises(NonIntegralLatticeError):
        ResidueTable(lm.diag(Fraction(1, 2), 1), 2, 3)
    with pytest.raises(ValueError):
        ResidueTable(lm.diag(1), 3, 0)


@pytest.mark.parametrize("case", CASES, ids=[_case_id(c) for c in CASES])
def test_stored_witnesses_hit_the_cell_representative(case):
    """动态规划的每个状态都保存 q(w) ≡ rep(cell) 的见证。"""
    L, p, K = case
    table = residue_table(L, p, K)
    for (cell, primitive), w in table.states.items():
        assert reduce_mod(L.q(w), p ** K) == cell_rep(cell, p) % p ** K
        if primitive:
            assert any(x % p for x in w)
