# backend/app/services/form_description.py
"""
型描述格式 (命令行与文件共用的 JSON):

    {"diag": [a1, ..., an]}
    {"gram2": [[...], ...]}                 加倍 Gram 矩阵
    {"blocks": ["H", "A", "Hhat", "Ahat", {"diag": [...]}, {"scale": 4, "of": "A"}, ...]}

blocks 中的各块做正交和。数值可以是整数或 "a/b" 字符串。
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

from app.core.exceptions import FormFormatError, PadiqError
from app.models.form_matrix import FormMatrix
from . import lattice_model

logger = logging.getLogger(__name__)

NAMED_BLOCKS = {
    "H": lattice_model.H,
    "A": lattice_model.A,
    "Hhat": lattice_model.Hhat,
    "Ahat": lattice_model.Ahat,
}


def _number(value: Any, field: str) -> Fraction:
    if isinstance(value, bool):
        raise FormFormatError("expected a number, got a boolean", field)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise FormFormatError(f"cannot parse number {value!r}", field)
    raise FormFormatError(f"expected an integer or 'a/b' string, got {type(value).__name__}", field)


def _integer(value: Any, field: str) -> int:
    number = _number(value, field)
    if number.denominator != 1:
        raise FormFormatError(f"expected an integer, got {value!r}", field)
    return int(number)


def _list(value: Any, field: str) -> List[Any]:
    if not isinstance(value, list) or not value:
        raise FormFormatError("expected a non-empty list", field)
    return value


def _build(node: Any, field: str) -> FormMatrix:
    try:
        if isinstance(node, str):
            if node not in NAMED_BLOCKS:
                raise FormFormatError(f"unknown block {node!r} (expected one of {sorted(NAMED_BLOCKS)})", field)
            return NAMED_BLOCKS[node]()
        if not isinstance(node, dict):
            raise FormFormatError("expected an object or a block name", field)
        keys = set(node)
        if keys == {"diag"}:
            entries = _list(node["diag"], f"{field}.diag")
            return lattice_model.diag(*[_number(x, f"{field}.diag[{i}]") for i, x in enumerate(entries)])
        if keys == {"gram2"}:
            rows = _list(node["gram2"], f"{field}.gram2")
            matrix = []
            for i, row in enumerate(rows):
                row = _list(row, f"{field}.gram2[{i}]")
                matrix.append([_integer(x, f"{field}.gram2[{i}][{j}]") for j, x in enumerate(row)])
            if any(len(row) != len(matrix) for row in matrix):
                raise FormFormatError("gram2 must be a square matrix", f"{field}.gram2")
            if any(matrix[i][j] != matrix[j][i] for i in range(len(matrix)) for j in range(i)):
                raise FormFormatError("gram2 must be symmetric", f"{field}.gram2")
            return lattice_model.make_form(matrix)
        if keys == {"blocks"}:
            blocks = _list(node["blocks"], f"{field}.blocks")
            return lattice_model.orthogonal_sum(
                *[_build(block, f"{field}.blocks[{i}]") for i, block in enumerate(blocks)]
            )
        if keys == {"scale", "of"}:
            factor = _number(node["scale"], f"{field}.scale")
            return lattice_model.scaled(_build(node["of"], f"{field}.of"), factor)
        raise FormFormatError(f"unexpected keys {sorted(keys)}", field)
    except FormFormatError:
        raise
    except PadiqError as exc:
        # 奇异、非整等语义错误同样归为格式错误，并指明出错位置
        raise FormFormatError(str(exc), field) from exc


def from_description(data: Any) -> FormMatrix:
    """由已解析的 JSON 对象构造格。"""
    return _build(data, "$")


def parse_form(text: str) -> FormMatrix:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormFormatError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})")
    return from_description(data)


def load_form(source: str) -> FormMatrix:
    """source 可以是内联 JSON，也可以是 JSON 文件路径。"""
    stripped = source.strip()
    if stripped.startswith("{"):
        return parse_form(stripped)
    path = Path(source)
    if not path.is_file():
        raise FormFormatError(f"form file not found: {source}")
    logger.info(f"Loading form description from {path}")
    return parse_form(path.read_text(encoding="utf-8"))


def to_description(L: FormMatrix) -> Dict[str, Any]:
    """格的 JSON 描述 (对角型用 diag，否则用 gram2)。"""
    if L.is_diagonal():
        entries = []
        for i in range(L.n):
            value = Fraction(L.gram2[i][i], 2)
            entries.append(int(value) if value.denominator == 1 else str(value))
        return {"diag": entries}
    return {"gram2": [list(row) for row in L.gram2]}
