from pathlib import Path

import pytest

import deftop

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def fx(name):
    return deftop.load(FIXTURES / f"{name}.top")


def test_validate_reports_the_failing_check():
    assert deftop.validate(fx("affine"))["ok"] is True
    bad = deftop.validate(fx("broken_membership"))
    assert bad["ok"] is False
    assert "membership" in str(bad)


def test_parse_errors_carry_the_line():
    with pytest.raises(deftop.ParseError, match="line 3"):
        deftop.validate("space { (0,1) }\ntopology {\n  on (0,1) at a: { (a, };\n}\n")


def test_figure_eight():
    v = deftop.analyze(fx("infty"))
    assert v["affinizable"] is True
    assert v["exceptional"]["A"] == "{2}"
    assert deftop.shadows_at(fx("infty"), 2) == ["0", "2", "4"]
    assert deftop.closure(fx("infty"), "(0,1/8)") == "(0,1/8] ∪ {2}"


def test_non_regular_example():
    v = deftop.analyze(fx("nonregular"))
    assert v["hausdorff"] is True
    assert v["regular"] is False
    assert v["affinizable"] is False
    assert v["components"]["result"] == "NoFiniteDecomposition"


def test_embedding_is_certified():
    e = deftop.embed(fx("infty"))
    assert len(e["embedding"]["anchors"]) == 1
    assert len(e["embedding"]["curves"]) == 2
    assert e["certificate"]["ok"] is True
    with pytest.raises(deftop.DomainError):
        deftop.embed(fx("lex"))


def test_oracle_agrees():
    r = deftop.oracle(fx("chain"))
    assert r["discrepancies"] == []


def test_random_specs_are_reproducible_and_valid():
    a, b = deftop.random_spec(11), deftop.random_spec(11)
    assert a == b
    assert deftop.validate(a)["ok"] is True
    assert deftop.normalize_source(deftop.normalize_source(a)) == deftop.normalize_source(a)


def test_shadow_map_lists_points():
    m = deftop.shadow_map(fx("infty"))
    assert "map" in m and "classes" in m
