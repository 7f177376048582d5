"""Forest parsing, validation, definiteness, reduction, canonical form."""

import json

import pytest

from plumb import forest as F
from plumb.catalog import chain_forest, e8_forest, star_forest


def parse(text):
    return F.parse_forest(text)


# ---------------------------------------------------------------- parsing

def test_parse_vertices_and_edges():
    g = parse(
        """
        # a star
        vertex a -1
        vertex b -2
        vertex c -3
        vertex d -7
        edge a b
        edge a c
        edge a d
        """
    )
    assert g.ids == ("a", "b", "c", "d")
    assert g.weights == (-1, -2, -3, -7)
    assert g.edges == ((0, 1), (0, 2), (0, 3))
    assert g.degrees() == (3, 1, 1, 1)


def test_parse_chain_autonaming_continues():
    g = parse("chain -2 -1 -2\nchain -5")
    assert g.ids == ("c1", "c2", "c3", "c4")
    assert g.weights == (-2, -1, -2, -5)
    assert g.edges == ((0, 1), (1, 2))


def test_parse_forward_edge_reference():
    g = parse("edge x y\nvertex x -2\nvertex y -3")
    assert g.edges == ((0, 1),)


def test_parse_empty_is_empty_forest():
    g = parse("# nothing\n\n")
    assert g.n == 0
    assert F.is_negative_definite(g)
    assert F.h1_order(g) == 1


def test_parse_error_positions():
    with pytest.raises(F.ParseError, match="line 2"):
        parse("vertex a -1\nvertex a -2")
    with pytest.raises(F.ParseError, match="unknown endpoint"):
        parse("vertex a -1\nedge a zz")
    with pytest.raises(F.ParseError, match="bad weight"):
        parse("vertex a x")
    with pytest.raises(F.ParseError, match="unknown directive"):
        parse("vertexx a -1")
    with pytest.raises(F.ParseError, match="self-loop"):
        parse("vertex a -1\nedge a a")
    with pytest.raises(F.ParseError, match="repeated edge"):
        parse("vertex a -1\nvertex b -2\nedge a b\nedge b a")
    with pytest.raises(F.ParseError, match="cycle"):
        parse("chain -2 -2 -2\nedge c1 c3")


def test_parse_json_and_text_roundtrip():
    g = star_forest(-1, [-2, -3, -7])
    text = F.forest_to_text(g)
    assert parse(text) == g
    obj = F.forest_to_json_obj(g)
    assert F.parse_forest_json(json.dumps(obj)) == g
    assert F.parse_forest_json(obj) == g


def test_parse_json_errors():
    with pytest.raises(F.ParseError, match="unknown endpoint"):
        F.parse_forest_json({"vertices": [{"id": "a", "weight": -2}], "edges": [["a", "b"]]})
    with pytest.raises(F.ParseError, match="bad JSON"):
        F.parse_forest_json("{nope")
    with pytest.raises(F.ParseError, match="bad weight"):
        F.parse_forest_json({"vertices": [{"id": "a", "weight": 1.5}], "edges": []})


# ------------------------------------------------------- matrix / definiteness

def test_intersection_matrix():
    g = parse("chain -2 -1 -2")
    assert F.intersection_matrix(g) == ((-2, 1, 0), (1, -1, 1), (0, 1, -2))


def test_negative_definite_examples():
    assert F.is_negative_definite(chain_forest([-2, -2]))
    assert F.is_negative_definite(star_forest(-1, [-2, -3, -7]))
    assert F.is_negative_definite(e8_forest())
    # chain -1 -1 has det 0: minors (-1, 0)
    assert not F.is_negative_definite(chain_forest([-1, -1]))
    assert not F.is_negative_definite(chain_forest([2]))
    assert not F.is_negative_definite(chain_forest([0]))
    # positive-definite-looking blocks must fail too
    assert not F.is_negative_definite(chain_forest([-2, 2]))


def test_h1_orders():
    assert F.h1_order(chain_forest([-2])) == 2
    assert F.h1_order(chain_forest([-2, -2])) == 3
    assert F.h1_order(star_forest(-1, [-2, -3, -7])) == 1
    assert F.h1_order(e8_forest()) == 1
    assert F.h1_order(chain_forest([-1, -1])) == 0


# ------------------------------------------------------------- reduction

def test_reduce_chain_to_zero_vertex():
    g = parse("chain -2 -1 -2")
    reduced, trace = F.reduce_forest(g)
    # c2 blows down giving -1 -1 joined by an edge; one of those goes next,
    # leaving a single vertex of weight 0, which is a fixed point
    assert len(trace) == 2
    assert reduced.n == 1
    assert reduced.weights == (0,)
    assert F.is_minimal(reduced)
    assert F.replay_trace(g, trace) == reduced


def test_reduce_records_replayable_trace():
    g = star_forest(-1, [-2, -3, -7])
    reduced, trace = F.reduce_forest(g)
    assert F.replay_trace(g, trace) == reduced
    # star center has degree 3: nothing to do
    assert reduced == g
    assert len(trace) == 0
    assert F.is_minimal(g)


def test_reduce_degree_zero_and_one():
    g = parse("vertex solo -1\nvertex a -1\nvertex b -5\nedge a b")
    reduced, trace = F.reduce_forest(g)
    assert reduced.ids == ("b",)
    assert reduced.weights == (-4,)
    assert [m.vertex for m in trace.moves] == ["solo", "a"]
    assert F.replay_trace(g, trace) == reduced


def test_replay_rejects_wrong_graph():
    g = parse("chain -2 -1 -2")
    _, trace = F.reduce_forest(g)
    other = parse("chain -2 -2 -2")
    with pytest.raises(ValueError):
        F.replay_trace(other, trace)


def test_reduce_cascades_to_fixed_point():
    # both -1 leaves go, which leaves m at -1 with degree 0, which also goes:
    # one reduce call runs the whole cascade and ends at the empty forest
    g = parse("vertex m -3\nvertex a -1\nvertex b -1\nedge m a\nedge m b")
    reduced, trace = F.reduce_forest(g)
    assert reduced.n == 0
    assert len(trace) == 3
    assert [m.vertex for m in trace.moves] == ["a", "b", "m"]
    assert F.replay_trace(g, trace) == reduced
    assert F.is_minimal(reduced)


def test_minimality_flags():
    assert F.is_minimal(e8_forest())
    assert not F.is_minimal(parse("chain -2 -1 -2"))
    assert not F.is_minimal(parse("vertex a -1"))
    # -1 of degree 3 is minimal (no move applies)
    assert F.is_minimal(star_forest(-1, [-2, -3, -7]))


# ---------------------------------------------------------- canonical form

def test_canonical_code_relabel_invariance():
    a = parse("vertex p -2\nvertex q -3\nvertex r -2\nedge p q\nedge q r")
    b = parse("vertex z -2\nvertex y -2\nvertex x -3\nedge x y\nedge x z")
    assert F.canonical_code(a) == F.canonical_code(b)


def test_canonical_code_distinguishes_weights_and_shape():
    assert F.canonical_code(chain_forest([-2, -3])) != F.canonical_code(chain_forest([-3, -3]))
    assert F.canonical_code(chain_forest([-2, -2, -2])) != F.canonical_code(
        star_forest(-2, [-2, -2, -2])
    )
    # position of the odd weight along a path matters
    assert F.canonical_code(chain_forest([-3, -2, -2])) == F.canonical_code(
        chain_forest([-2, -2, -3])
    )
    assert F.canonical_code(chain_forest([-2, -3, -2])) != F.canonical_code(
        chain_forest([-2, -2, -3])
    )


def test_canonical_code_forest_component_order():
    a = parse("vertex a -2\nvertex b -3")
    b = parse("vertex a -3\nvertex b -2")
    assert F.canonical_code(a) == F.canonical_code(b)


def test_components():
    g = parse("chain -2 -2\nvertex solo -5")
    assert g.components() == ((0, 1), (2,))
