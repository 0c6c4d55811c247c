# backend/app/tests/cli/test_commands.py
import json

import pytest

from app.main import run
from app.models.reports import RepVerdict
from app.cli.render import to_json

RAMANUJAN = '{"diag": [1, 1, 1, 9]}'


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- Text output ---

def test_rep_text(capsys):
    code, out, _ = _run(capsys, "rep", "--form", '{"diag": [1, 1, 3, 3]}', "-p", "3", "-a", "9", "--primitive")
    assert code == 0
    assert "NOT_REPRESENTED" in out
    assert "no solution mod 3^3" in out


def test_universal_text_shows_the_rule(capsys):
    code, out, _ = _run(capsys, "universal", "--form", '{"diag": [1, 1, 1, 1]}', "-p", "2")
    assert code == 0
    assert "[anisotropic]" in out
    assert "primitively universal: NO" in out


def test_verdict_text_lists_the_progression(capsys):
    code, out, _ = _run(capsys, "verdict", "--form", RAMANUJAN)
    assert code == 0
    assert "almost primitively universal: NO" in out
    assert "0 mod 8" in out


def test_text_output_is_reproducible(capsys):
    argv = ("analyze", "--form", RAMANUJAN)
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second


# --- JSON output ---

def test_scan_json(capsys):
    code, out, _ = _run(capsys, "--json", "scan", "--form", RAMANUJAN, "-B", "100")
    assert code == 0
    data = json.loads(out)
    assert data["excluded"] == [7]
    assert 8 in data["primitive_excluded"]


def test_jordan_json(capsys):
    code, out, _ = _run(capsys, "--json", "jordan", "--form", '{"blocks": ["Ahat", "A"]}', "-p", "2")
    assert code == 0
    components = json.loads(out)["components"]
    assert [c["scale_exp"] for c in components] == [-1, 0]
    assert [c["proper"] for c in components] == [False, False]


def test_rep_json_reloads_to_the_same_report(capsys):
    code, out, _ = _run(capsys, "--json", "rep", "--form", RAMANUJAN, "-p", "2", "-a", "2^3", "--primitive")
    assert code == 0
    report = RepVerdict.model_validate(json.loads(out))
    assert not report.represented
    assert to_json(report) + "\n" == out


def test_theorem3_json(capsys):
    code, out, _ = _run(capsys, "--json", "theorem3", "--form", '{"diag": [1, 1, 1, 2]}')
    assert code == 0
    data = json.loads(out)
    assert data["applicable"] is True
    assert data["cross_check"] is True


def test_analyze_with_explicit_primes(capsys):
    code, out, _ = _run(capsys, "--json", "analyze", "--form", RAMANUJAN, "-p", "2", "-p", "3")
    assert code == 0
    assert [a["prime"] for a in json.loads(out)] == [2, 3]


@pytest.mark.parametrize("command", ["verify-paper", "verify-fixtures"])
def test_verify_selected_fixtures(capsys, command):
    code, out, _ = _run(capsys, command, "--only", "ahat-units-only")
    assert code == 0
    assert "1/1 fixtures passed" in out


def test_json_flag_after_the_subcommand(capsys):
    code, out, _ = _run(capsys, "rep", "--form", '{"diag": [1, 1, 3, 3]}', "-p", "3", "-a", "9",
                        "--primitive", "--json")
    assert code == 0
    assert json.loads(out)["decided"] == "NOT_REPRESENTED"


def test_json_flag_before_the_subcommand_is_kept(capsys):
    code, out, _ = _run(capsys, "--json", "jordan", "--form", '{"diag": [1, 3]}', "-p", "3",
                        "--log-level", "WARNING")
    assert code == 0
    assert "components" in json.loads(out)


def test_rep_with_unit_away_from_the_class_representative(capsys):
    code, out, _ = _run(capsys, "rep", "--form", '{"diag": [3]}', "-p", "5", "-a", "3", "--json")
    assert code == 0
    assert json.loads(out)["decided"] == "REPRESENTED"


# --- Errors and exit codes ---

def test_malformed_form_exits_with_two(capsys):
    code, out, err = _run(capsys, "jordan", "--form", '{"blocks": ["Q"]}', "-p", "2")
    assert code == 2
    assert out == ""
    assert "$.blocks[0]" in err


def test_domain_error_exits_with_one(capsys):
    code, _, err = _run(capsys, "rep", "--form", RAMANUJAN, "-p", "2", "-a", "0")
    assert code == 1
    assert "error" in err


@pytest.mark.parametrize("argv", [
    ["rep", "--form", RAMANUJAN, "-p", "4", "-a", "1"],
    ["rep", "--form", RAMANUJAN, "-p", "2", "-a", "x/y"],
    ["scan", "--form", RAMANUJAN],
    [],
])
def test_usage_errors_exit_with_two(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == 2


def test_gap_on_isotropic_form_is_a_domain_error(capsys):
    code, _, err = _run(capsys, "gap", "--form", '{"diag": [1, 1, 1, 1, 1]}', "-p", "2")
    assert code == 1
    assert "isotropic" in err
