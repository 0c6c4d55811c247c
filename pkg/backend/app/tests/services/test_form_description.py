# backend/app/tests/services/test_form_description.py
import json

import pytest

from app.core.exceptions import FormFormatError
from app.services import lattice_model as lm
from app.services.form_description import from_description, load_form, parse_form, to_description


def test_diag_description():
    assert parse_form('{"diag": [1, 1, 1, 9]}') == lm.diag(1, 1, 1, 9)
    assert parse_form('{"diag": ["1/2", 3]}').gram2 == ((1, 0), (0, 6))


def test_gram2_description():
    assert parse_form('{"gram2": [[2, 1], [1, 2]]}') == lm.Ahat()


def test_blocks_and_scaling():
    L = from_description({"blocks": ["Hhat", {"scale": 4, "of": "A"}, {"diag": [2]}]})
    expected = lm.orthogonal_sum(lm.Hhat(), lm.scaled(lm.A(), 4), lm.diag(2))
    assert L == expected


@pytest.mark.parametrize("description, field", [
    ({"blocks": ["H", "B"]}, "$.blocks[1]"),
    ({"gram2": [[2, 1], [0, 2]]}, "$.gram2"),
    ({"gram2": [[2, 1, 0], [1, 2, 0]]}, "$.gram2"),
    ({"diag": []}, "$.diag"),
    ({"diag": [1, "x"]}, "$.diag[1]"),
    ({"diag": [True]}, "$.diag[0]"),
    ({"gram2": [[2, "1/2"], ["1/2", 2]]}, "$.gram2[0][1]"),
    ({"scale": 2}, "$"),
    ({"blocks": [{"scale": "1/2", "of": "Ahat"}]}, "$.blocks[0]"),
])
def test_malformed_descriptions_name_the_field(description, field):
    with pytest.raises(FormFormatError) as excinfo:
        from_description(description)
    assert excinfo.value.field == field


def test_semantic_errors_become_format_errors():
    """奇异矩阵与非整对角元都报告为格式错误。"""
    with pytest.raises(FormFormatError):
        parse_form('{"diag": [1, 0]}')
    with pytest.raises(FormFormatError):
        parse_form('{"diag": ["1/3"]}')


def test_invalid_json():
    with pytest.raises(FormFormatError) as excinfo:
        parse_form('{"diag": [1, 1')
    assert "invalid JSON" in str(excinfo.value)


def test_load_form_from_file(tmp_path):
    path = tmp_path / "form.json"
    path.write_text(json.dumps({"blocks": ["Ahat", "A"]}), encoding="utf-8")
    assert load_form(str(path)) == lm.orthogonal_sum(lm.Ahat(), lm.A())
    with pytest.raises(FormFormatError):
        load_form(str(tmp_path / "missing.json"))


@pytest.mark.parametrize("L", [
    lm.diag(1, 1, 25, 25),
    lm.diag(1, 2),
    lm.Ahat(),
    lm.orthogonal_sum(lm.Hhat(), lm.diag(2)),
])
def test_descriptions_reload_to_the_same_form(L):
    assert from_description(json.loads(json.dumps(to_description(L)))) == L


def test_half_diagonal_entries_are_strings():
    assert to_description(lm.diag(1, 2)) == {"diag": [1, 2]}
    assert to_description(lm.make_form([[1, 0], [0, 6]])) == {"diag": ["1/2", 3]}
