import pytest

from polyrew import diagram as dg
from polyrew.cells import (Polygraph, PolygraphError, OneCell, TwoCell,
                           TypedWord, parse_polygraph, serialize_polygraph,
                           validate)

from conftest import FIXTURES, load_poly


def test_permutations_counts(perm):
    assert perm.counts() == (1, 1, 1, 2)
    assert [c.name for c in perm.cells3] == ["inv", "yb"]


def test_counterexample_counts(ce):
    assert ce.counts() == (1, 1, 3, 4)


def test_monoid_validates(monoid):
    assert validate(monoid) == []


def test_two_zero_cell_variant_validates():
    variant = load_poly("ce_variant.poly")
    assert validate(variant) == []
    assert variant.counts() == (2, 2, 4, 2)


def test_globularity_error():
    bad = """
    polygraph bad {
      cell0 pt;
      cell1 w : pt -> pt;
      cell2 m : w w => w;
      cell3 oops : (m * id(w)) => ((m * id(w)) ; m);
    }
    """
    with pytest.raises(PolygraphError, match="globularity"):
        parse_polygraph(bad)


def test_composability_violation_report():
    p = Polygraph(
        name="bad",
        cells0=("x", "y"),
        cells1=(OneCell("p", "x", "y"), OneCell("q", "y", "x")),
        cells2=(TwoCell("f", TypedWord(("p", "p")), TypedWord(("p", "q"))),),
    )
    report = validate(p)
    assert len([v for v in report if "not composable" in v]) == 1


def test_syntax_error_position():
    with pytest.raises(PolygraphError, match="line"):
        parse_polygraph("polygraph x {\n  cell0 ;\n}")


def test_duplicate_names_rejected():
    bad = """
    polygraph dup {
      cell0 pt;
      cell1 w : pt -> pt;
      cell2 m : w w => w;
      cell2 m : w => w;
    }
    """
    with pytest.raises(PolygraphError, match="duplicate"):
        parse_polygraph(bad)


@pytest.mark.parametrize("name", ["monoid.poly", "permutations.poly",
                                  "counterexample.poly", "ce_variant.poly",
                                  "xi.poly", "squier.poly"])
def test_roundtrip(name):
    p = load_poly(name)
    p2 = parse_polygraph(serialize_polygraph(p))
    assert p2.name == p.name
    assert p2.counts() == p.counts()
    assert p2.cells0 == p.cells0
    assert p2.cells1 == p.cells1
    assert p2.cells2 == p.cells2
    assert p2.rules2 == p.rules2
    for a, b in zip(p.cells3, p2.cells3):
        assert a.name == b.name
        assert dg.equal_up_to_exchange(p.sig, a.src, b.src)
        assert dg.equal_up_to_exchange(p.sig, a.tgt, b.tgt)


def test_empty_word_annotation_in_serialization(ce):
    text = serialize_polygraph(ce)
    assert "empty(pt)" in text


def test_mixing_rules_and_cell3_rejected():
    bad = """
    polygraph mix {
      cell0 pt;
      cell1 a : pt -> pt;
      cell2 f : a => a;
      rule r : a a => a;
      cell3 z : f => f;
    }
    """
    with pytest.raises(PolygraphError):
        parse_polygraph(bad)
