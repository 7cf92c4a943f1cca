import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valuationlab import arcgon as ag
from valuationlab.boxes import Box, make_box
from valuationlab.core import EMPTY, MalformedDocument, NotConvex
from valuationlab.documents import (
    body_to_doc,
    document_hash,
    load_document,
    parse_body,
    parse_exact,
    parse_real,
    parse_valuation,
)
from valuationlab.valuations import (
    BoxFunction,
    Combination,
    Composite,
    PhiF,
    PhiL,
    PiecewiseConstant,
    TrigPolynomial,
    Vol,
    evaluate,
)


@pytest.mark.parametrize("text, value", [
    (2, 2.0), ("1/4", 0.25), ("-2.5", -2.5), ("pi", math.pi), ("pi/2", math.pi / 2),
    ("3*pi/4", 3 * math.pi / 4), ("-pi", -math.pi), ("2pi", 2 * math.pi),
])
def test_parse_real(text, value):
    assert math.isclose(parse_real(text), value)


@pytest.mark.parametrize("bad", ["abc", True, None, "1/0", [1]])
def test_parse_real_rejects(bad):
    with pytest.raises(MalformedDocument):
        parse_real(bad)


def test_parse_exact_prefers_fractions():
    assert parse_exact("2/3") == Fraction(2, 3)
    assert math.isclose(parse_exact("pi"), math.pi)


def test_parse_basic_bodies():
    assert math.isclose(ag.area(parse_body({"polygon": [[0, 0], [1, 0], [0, 1]]})), 0.5)
    assert math.isclose(ag.area(parse_body({"disk": {"c": [0, 0], "r": "1/2"}})), math.pi / 4)
    assert parse_body({"segment": [[0, 0], [1, 1]]}).kind == "segment"
    assert parse_body({"point": [1, 2]}).kind == "point"
    assert parse_body({"box": [["0", "1/2"], [0, 1], [0, 1]]}) == make_box(
        [(0, Fraction(1, 2)), (0, 1), (0, 1)])


def test_parse_composed_bodies():
    doc = {"clip": {"body": {"sum": [{"box": [[0, 1], [0, 1]]}, {"disk": {"c": [0, 0], "r": 1}}]},
                    "u": [0, 2], "t": 0}}
    K = parse_body(doc)
    # the rounded unit square below y = 0 is a quarter-disk pair plus a 1 x 1 strip
    assert math.isclose(ag.area(K), 1 + math.pi / 2)
    assert parse_body({"clip": {"body": {"point": [0, 0]}, "u": [1, 0], "t": -1}}) is EMPTY


@pytest.mark.parametrize("doc", [
    {"polygon": [[0, 0], [1, 0]], "disk": {}},
    {"hexagon": []},
    {"disk": {"c": [0, 0]}},
    {"clip": {"body": {"point": [0, 0]}, "u": [0, 0], "t": 0}},
    {"sum": [{"box": [[0, 1]]}, {"point": [0, 0]}]},
    "polygon",
])
def test_malformed_bodies(doc):
    with pytest.raises(MalformedDocument):
        parse_body(doc)


def test_nonconvex_polygon_keeps_its_error():
    with pytest.raises(NotConvex):
        parse_body({"polygon": [[0, 0], [2, 0], [1, 0.2], [1, 2]]})


def test_body_round_trip_for_flat_bodies():
    for doc in ({"polygon": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]}, {"point": [1.0, 2.0]},
                {"segment": [[0.0, 0.0], [3.0, 4.0]]}, {"box": [["0", "1"]]}):
        K = parse_body(doc)
        again = parse_body(body_to_doc(K))
        if isinstance(K, Box):
            assert again == K
        else:
            assert ag.hausdorff(K, again) <= 1e-12
    with pytest.raises(MalformedDocument):
        body_to_doc(ag.disk((0, 0), 1))


def test_parse_valuations():
    assert isinstance(parse_valuation({"vol": {}}), Vol)
    assert parse_valuation({"phi_l": "1/2"}) == PhiL(0.5)
    f = parse_valuation({"phi_f": {"piecewise": [[0, "pi", 1], ["pi", "2*pi", 0]]}})
    assert isinstance(f, PhiF) and isinstance(f.f, PiecewiseConstant)
    g = parse_valuation({"phi_f": {"trig": {"a": [1, 0, 2], "b": [0, 0, 1]}}})
    assert isinstance(g.f, TrigPolynomial)
    combo = parse_valuation({"combo": [["2/3", {"vol": {}}], [1, {"euler": {}}]]})
    assert isinstance(combo, Combination)
    assert evaluate(combo, make_box([(0, 3), (0, 1)])) == 3


def test_parse_polynomial_box_functions():
    V = parse_valuation({"box_poly": {"n": 2, "expr": "a1*a2 + 7"}})
    assert isinstance(V, BoxFunction) and V.oracle.translation_invariant
    assert evaluate(V, make_box([(1, 3), (0, "1/2")])) == 8
    E = parse_valuation({"endpoint_poly": {"n": 1, "expr": "lo1**2 + hi1**3/3"}})
    assert not E.oracle.translation_invariant
    assert evaluate(E, make_box([(-1, 3)])) == 10


@pytest.mark.parametrize("doc", [
    {"box_poly": {"n": 2, "expr": "a3"}},
    {"box_poly": {"n": 1, "expr": "__import__('os')"}},
    {"box_poly": {"n": 1, "expr": "1/a1"}},
    {"box_poly": {"n": 0, "expr": "1"}},
    {"box_poly": {"n": 1, "expr": "a1 +"}},
    {"phi_f": {"piecewise": [[0, 1, 1]]}},
    {"phi_f": {}},
    {"unknown": {}},
])
def test_malformed_valuations(doc):
    with pytest.raises(MalformedDocument):
        parse_valuation(doc)


def test_composite_from_inline_and_path(tmp_path):
    fam = {"n": 2, "components": {"{1,2}": {"certified": "2*a1*a2"}, "{}": {"certified": "1"}}}
    V = parse_valuation({"composite": fam})
    assert isinstance(V, Composite) and evaluate(V, make_box([(0, 1), (0, 3)])) == 7
    (tmp_path / "fam.json").write_text(json.dumps(fam))
    W = parse_valuation({"composite": "fam.json"}, base_dir=str(tmp_path))
    assert evaluate(W, make_box([(0, 1), (0, 3)])) == 7


def test_load_document(tmp_path):
    assert load_document('{"vol": {}}') == {"vol": {}}
    path = tmp_path / "b.json"
    path.write_text('{"point": [0, 0]}')
    assert load_document(str(path)) == {"point": [0, 0]}
    with pytest.raises(MalformedDocument):
        load_document(str(tmp_path / "missing.json"))
    with pytest.raises(MalformedDocument):
        load_document("{not json")


@given(st.dictionaries(st.text(max_size=5), st.integers(), max_size=5))
def test_document_hash_ignores_key_order(d):
    reordered = dict(reversed(list(d.items())))
    assert document_hash(d) == document_hash(reordered)
    assert len(document_hash(d)) == 64
