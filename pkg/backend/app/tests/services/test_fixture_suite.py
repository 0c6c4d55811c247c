# backend/app/tests/services/test_fixture_suite.py
import pytest

from app.core.config import settings
from app.services.fixture_suite import FIXTURES, run_fixtures


@pytest.fixture
def small_samples(monkeypatch):
    """把随机用例缩到几个格。"""
    monkeypatch.setattr(settings, "PADIQ_ORACLE_SAMPLES", 4)
    monkeypatch.setattr(settings, "PADIQ_ISOTROPY_SAMPLES", 4)
    monkeypatch.setattr(settings, "PADIQ_RANK5_SAMPLES", 3)
    monkeypatch.setattr(settings, "PADIQ_RANK5_SPECTRUM_DEPTH", 3)


def test_small_fixtures_pass():
    names = ["hhat-primitively-universal", "ahat-units-only", "ahat-plus-a", "anisotropic-gaps",
             "proper-unimodular-binaries", "small-complement-unit-classes"]
    results = run_fixtures(names)
    assert [r.name for r in results] == names
    assert all(r.passed for r in results), [r.detail for r in results if not r.passed]


def test_random_fixtures_pass_on_small_samples(small_samples):
    results = run_fixtures(["naive-oracle-agreement", "isotropy-routes-agree",
                            "rank-five-universal-implies-primitive"])
    assert all(r.passed for r in results), [r.detail for r in results if not r.passed]


def test_unknown_fixture_names_are_rejected():
    with pytest.raises(KeyError):
        run_fixtures(["no-such-fixture"])


def test_failures_are_reported_not_raised(monkeypatch):
    def broken():
        raise ArithmeticError("boom")

    monkeypatch.setitem(FIXTURES, "broken", broken)
    (result,) = run_fixtures(["broken"])
    assert not result.passed
    assert "ArithmeticError" in result.detail


@pytest.mark.slow
def test_full_fixture_corpus():
    results = run_fixtures()
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]
