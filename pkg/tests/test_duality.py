import numpy as np
import pytest
from hypothesis import given

from conftest import DIAMOND_EDGES, hypergraphs, make_graph
from hyperkernel import DataError, Hypergraph, LinkQuery, dualize, enumerate_candidates, extend_dual
from hyperkernel.duality import QUERY_LABEL, dual_to_hgr, link_examples, parse_dual
from hyperkernel.synthetic import random_hypergraph

import oracles


def _members(d):
    return {eid: set(m) for eid, _, m in d.graph.edges()}


def test_diamond_dual(diamond):
    d = dualize(diamond)
    assert set(d.graph.vertex_ids) == set(DIAMOND_EDGES)
    assert _members(d) == {
        "v1": {"e1", "e3", "e5"},
        "v2": {"e1", "e2"},
        "v3": {"e2", "e3", "e4"},
        "v4": {"e4", "e5"},
    }
    assert not d.dummy_vertices


def test_path_gets_two_dummies():
    g = make_graph({"a": "A", "b": "B", "c": "C"}, [("ab", "X", ["a", "b"]), ("bc", "Y", ["b", "c"])])
    d = dualize(g)
    assert len(d.dummy_vertices) == 2
    m = _members(d)
    assert m["b"] == {"ab", "bc"}
    (da,) = m["a"] - {"ab"}
    (dc,) = m["c"] - {"bc"}
    assert {da, dc} == set(d.dummy_vertices)
    assert "~dummy" in da and "~dummy" in dc
    assert d.graph.vertex_label(da) == "X" and d.graph.vertex_label(dc) == "Y"
    assert d.graph.edge_label("a") == "A"


def test_single_edge_labels():
    g = make_graph({"u": "A", "v": "B"}, [("e", "X", ["u", "v"])])
    d = dualize(g)
    assert sorted(d.graph.vertex_labels) == ["X", "X", "X"]
    assert d.graph.edge_label("u") == "A" and d.graph.edge_label("v") == "B"
    assert d.graph.sigma == ("X",) and d.graph.xi == ("A", "B")


def test_dualize_errors():
    with pytest.raises(DataError):
        dualize(make_graph({"a": "A"}, []))
    with pytest.raises(DataError, match="isolated"):
        dualize(make_graph({"a": "A", "b": "A", "c": "A"}, [("e", "X", ["a", "b"])]))


@given(hypergraphs(max_vertices=7, max_edges=8))
def test_dual_matches_incidence_transpose(g):
    if g.n_edges == 0 or any(g.degree(v) == 0 for v in g.vertex_ids):
        return
    d = dualize(g)
    inc = oracles.incidence_transpose(g)
    m = _members(d)
    for v in g.vertex_ids:
        real = m[v] - set(d.dummy_vertices)
        assert real == inc[v]
        assert len(m[v]) >= 2
        assert len(m[v] - real) == (1 if len(inc[v]) == 1 else 0)
    # size identities
    assert d.graph.n_vertices == g.n_edges + len(d.dummy_vertices)
    assert d.graph.n_edges == g.n_vertices
    # label transfer
    assert sorted(d.graph.vertex_label(x) for x in d.real_vertices) == sorted(g.edge_labels)
    assert sorted(d.graph.edge_labels) == sorted(g.vertex_labels)


def _involution_candidate(seed):
    rng = np.random.default_rng(seed)
    for attempt in range(1000):
        g = random_hypergraph(int(rng.integers(3, 8)), int(rng.integers(3, 10)), seed=int(rng.integers(1 << 30)),
                              max_cardinality=4)
        inc = oracles.incidence_transpose(g)
        sets = [frozenset(s) for s in inc.values()]
        if all(len(s) >= 2 for s in sets) and len(set(sets)) == len(sets):
            return g
    raise AssertionError("no candidate")


@pytest.mark.parametrize("seed", range(10))
def test_dual_involution(seed):
    g = _involution_candidate(seed)
    dd = dualize(dualize(g).graph)
    assert not dd.dummy_vertices
    assert oracles.isomorphic(dd.graph, g)


def test_extend_open_diamond(diamond):
    g = diamond.without_edges(["e5"])
    d = extend_dual(g, LinkQuery(["v1", "v4"]))
    assert sorted(d.modified_edges) == ["v1", "v4"]
    m = _members(d)
    assert d.query_vertex in m["v1"] and d.query_vertex in m["v4"]
    assert d.graph.vertex_label(d.query_vertex) == QUERY_LABEL


def test_extend_existing_edge_duplicates_incidence(diamond):
    d = extend_dual(diamond, LinkQuery(["v1", "v2"]))
    holders_e1 = {v for v, m in _members(d).items() if "e1" in m}
    holders_q = {v for v, m in _members(d).items() if d.query_vertex in m}
    assert holders_e1 == holders_q == {"v1", "v2"}
    assert d.graph.vertex_label("e1") != d.graph.vertex_label(d.query_vertex)


def test_extend_triangle_remnant_matches_full_dual(triangle):
    full = dualize(triangle)
    rest = triangle.without_edges(["rb"])
    ext = extend_dual(rest, LinkQuery(["r", "b"]), query_label="X")
    assert not ext.dummy_vertices
    relabeled = {k: {("rb" if x == ext.query_vertex else x) for x in v} for k, v in _members(ext).items()}
    assert relabeled == _members(full)


@given(hypergraphs(max_vertices=7, max_edges=8, min_vertices=2))
def test_extend_changes_exactly_member_edges(g):
    if g.n_edges == 0 or any(g.degree(v) == 0 for v in g.vertex_ids):
        return
    members = list(g.vertex_ids[:2])
    base = _members(dualize(g))
    ext = extend_dual(g, LinkQuery(members))
    got = _members(ext)
    changed = [v for v in g.vertex_ids if got[v] != base[v]]
    assert sorted(changed) == sorted(members)
    for v in members:
        # a former self-loop loses its dummy and gains the query
        real_before = base[v] - set(dualize(g).dummy_vertices)
        assert got[v] == real_before | {ext.query_vertex}
        if len(real_before) >= 2:
            assert got[v] - base[v] == {ext.query_vertex}


def test_extend_errors(diamond):
    with pytest.raises(DataError):
        extend_dual(diamond, LinkQuery(["v1"]))
    with pytest.raises(DataError):
        extend_dual(diamond, LinkQuery(["v1", "zz"]))


def test_candidates():
    tri = make_graph({c: "A" for c in "abc"}, [(f"{x}{y}", "X", [x, y]) for x, y in ("ab", "bc", "ac")])
    assert enumerate_candidates(tri, 2) == []
    path = make_graph({c: "A" for c in "abc"}, [("ab", "X", ["a", "b"]), ("bc", "X", ["b", "c"])])
    assert [sorted(q.members) for q in enumerate_candidates(path, 2)] == [["a", "c"]]
    g = random_hypergraph(10, 15, seed=4, max_cardinality=2)
    assert len(enumerate_candidates(g, 2)) == 30
    with pytest.raises(DataError):
        enumerate_candidates(path, 4)
    with pytest.raises(DataError):
        enumerate_candidates(path, 1)


def test_sampled_candidates_are_seeded():
    g = random_hypergraph(30, 40, seed=1, max_cardinality=2)
    a = enumerate_candidates(g, 2, sample=12, seed=3)
    b = enumerate_candidates(g, 2, sample=12, seed=3)
    assert a == b and len({q.members for q in a}) == 12
    existing = set(g.edge_members)
    assert not any(q.members in existing for q in a)
    assert set(q.members for q in a) <= set(q.members for q in enumerate_candidates(g, 2))


def test_link_examples_share_query_label(diamond):
    g = diamond.without_edges(["e5"])
    ex = link_examples(g, ["e1"], [LinkQuery(["v1", "v4"])])
    assert [i for i, _ in ex] == ["e1", "v1+v4"]
    for _, d in ex:
        assert d.graph.vertex_label(d.query_vertex) == QUERY_LABEL
        assert d.graph.sigma == ex[0][1].graph.sigma
    assert "e1" not in ex[0][1].graph.vertex_ids


def test_dual_text_round_trip(diamond):
    d = extend_dual(diamond.without_edges(["e5"]), LinkQuery(["v1", "v4"]))
    back = parse_dual(dual_to_hgr(d))
    assert back.graph == d.graph
    assert back.query_vertex == d.query_vertex
    assert back.dummy_vertices == d.dummy_vertices
    assert back.vertex_origin == d.vertex_origin
    assert sorted(back.modified_edges) == sorted(d.modified_edges)
