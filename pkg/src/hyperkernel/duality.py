"""Dual and extended dual hypergraphs.

Hyperedges of the input become dual vertices (keeping their hyperedge
label) and every input vertex becomes the dual hyperedge of its incident
hyperedges (keeping its vertex label).  A vertex of degree one would give a
self-loop; it is repaired with a dummy dual vertex that copies the label of
the looped dual vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .hypermodel import Hypergraph, parse_hypergraph

__all__ = [
    "QUERY_LABEL",
    "DualHypergraph",
    "LinkQuery",
    "dualize",
    "extend_dual",
    "enumerate_candidates",
    "link_examples",
    "dual_to_hgr",
    "parse_dual",
]

#: label of the candidate vertex added by :func:`extend_dual`
QUERY_LABEL = "?"
QUERY_ID = "~query"
DUMMY_TAG = "~dummy"


@dataclass(frozen=True)
class LinkQuery:
    """A hypothesized hyperedge over original vertex ids."""

    members: frozenset[str]

    def __init__(self, members: Iterable[str]):
        object.__setattr__(self, "members", frozenset(members))


@dataclass(frozen=True)
class DualHypergraph:
    graph: Hypergraph
    vertex_origin: dict[str, str]
    edge_origin: dict[str, str]
    dummy_vertices: frozenset[str] = frozenset()
    query_vertex: str | None = None
    modified_edges: tuple[str, ...] = field(default=())

    @property
    def real_vertices(self) -> list[str]:
        return [v for v in self.graph.vertex_ids if v not in self.dummy_vertices]


def dualize(
    g: Hypergraph, vertex_symbols: Iterable[str] = (), drop_isolated: bool = False
) -> DualHypergraph:
    """Dual hypergraph of ``g`` with degree-one self-loops repaired.

    The dual vertex alphabet is ``g.xi`` plus ``vertex_symbols`` (declare
    :data:`QUERY_LABEL` there so plain and extended duals share alphabets);
    the dual hyperedge alphabet is ``g.sigma``.  Isolated vertices are an
    error unless ``drop_isolated`` is set.
    """
    return _build_dual(g, None, vertex_symbols, drop_isolated)


def extend_dual(
    g: Hypergraph,
    q: LinkQuery,
    query_label: str = QUERY_LABEL,
    vertex_symbols: Iterable[str] = (),
    drop_isolated: bool = False,
) -> DualHypergraph:
    """Dual of ``g`` with one extra vertex standing for the candidate edge ``q``.

    Every dual hyperedge of a member of ``q`` gains the new vertex.  A member
    that had degree one in ``g`` is no longer a self-loop, so its dummy is
    not created.
    """
    members = set(q.members)
    if len(members) < 2:
        raise DataError("link query needs at least two members")
    for m in sorted(members):
        if not g.has_vertex(m):
            raise DataError(f"link query member {m!r} is not a vertex")
    return _build_dual(g, (members, query_label), vertex_symbols, drop_isolated)


def _build_dual(g, query, vertex_symbols, drop_isolated) -> DualHypergraph:
    if g.n_edges == 0 and query is None:
        raise DataError("cannot dualize a hypergraph without hyperedges")

    incident: list[list[str]] = [[] for _ in range(g.n_vertices)]
    for j, mem in enumerate(g.edge_member_indices):
        for i in mem:
            incident[i].append(g.edge_ids[j])

    taken = set(g.edge_ids)
    qid = None
    dual_vertices = list(zip(g.edge_ids, g.edge_labels))
    vertex_origin = {e: e for e in g.edge_ids}
    sigma_dual = set(g.xi) | set(vertex_symbols)
    xi_dual = set(g.sigma)
    modified = []
    if query is not None:
        members, qlabel = query
        qid = QUERY_ID
        while qid in taken:
            qid = "~" + qid
        taken.add(qid)
        dual_vertices.append((qid, qlabel))
        sigma_dual.add(qlabel)
        for i, vid in enumerate(g.vertex_ids):
            if vid in members:
                incident[i].append(qid)
                modified.append(vid)

    label_of = dict(dual_vertices)
    dual_edges = []
    edge_origin = {}
    dummies = []
    for i, (vid, vlab) in enumerate(g.vertices()):
        inc = incident[i]
        if not inc:
            if drop_isolated:
                continue
            raise DataError(f"vertex {vid!r} is isolated; its dual hyperedge would be empty")
        if len(inc) == 1:
            # suffix keyed on the original vertex so ids survive overlays
            did = f"{inc[0]}{DUMMY_TAG}{i + 1}"
            while did in taken:
                did = "~" + did
            taken.add(did)
            dummies.append((did, label_of[inc[0]]))
            vertex_origin[did] = inc[0]
            inc = [inc[0], did]
        dual_edges.append((vid, vlab, inc))
        edge_origin[vid] = vid

    if query is not None:
        vertex_origin[qid] = qid
    graph = Hypergraph(
        dual_vertices + dummies,
        dual_edges,
        sigma=sigma_dual,
        xi=xi_dual,
        name=f"dual({g.name})" if g.name else None,
    )
    return DualHypergraph(
        graph=graph,
        vertex_origin=vertex_origin,
        edge_origin=edge_origin,
        dummy_vertices=frozenset(d for d, _ in dummies),
        query_vertex=qid,
        modified_edges=tuple(modified),
    )


def enumerate_candidates(
    g: Hypergraph,
    arity: int = 2,
    sample: int | None = None,
    seed: int = 0,
) -> list[LinkQuery]:
    """Member sets of size ``arity`` that are not already hyperedges of ``g``.

    With ``sample=None`` all of them are returned in lexicographic vertex
    order; otherwise ``sample`` distinct candidates are drawn uniformly
    without replacement using ``seed``.
    """
    if arity < 2:
        raise DataError("candidate arity must be at least 2")
    n = g.n_vertices
    if arity > n:
        raise DataError(f"arity {arity} exceeds the number of vertices ({n})")
    existing = {m for m in g.edge_member_indices if len(m) == arity}
    ids = g.vertex_ids
    if sample is None:
        return [
            LinkQuery(ids[i] for i in combo)
            for combo in itertools.combinations(range(n), arity)
            if combo not in existing
        ]

    available = math.comb(n, arity) - len(existing)
    if sample > available:
        raise DataError(f"requested {sample} candidates but only {available} exist")
    rng = np.random.default_rng(seed)
    if available <= 4 * sample or available <= 100_000:
        pool = [c for c in itertools.combinations(range(n), arity) if c not in existing]
        picks = rng.choice(len(pool), size=sample, replace=False)
        chosen = [pool[i] for i in sorted(picks)]
    else:
        seen: set[tuple[int, ...]] = set()
        chosen = []
        while len(chosen) < sample:
            combo = tuple(sorted(rng.choice(n, size=arity, replace=False).tolist()))
            if combo in existing or combo in seen:
                continue
            seen.add(combo)
            chosen.append(combo)
        chosen.sort()
    return [LinkQuery(ids[i] for i in combo) for combo in chosen]


def link_examples(
    g: Hypergraph,
    positives: Sequence[str],
    candidates: Sequence[LinkQuery],
    query_label: str = QUERY_LABEL,
) -> list[tuple[str, DualHypergraph]]:
    """Extended duals for link prediction, one per example.

    An existing edge is re-queried: it is removed from ``g`` and put back as
    the candidate vertex, so positives and candidates carry the same root
    label.  Example ids are the edge id for positives and the sorted member
    list joined by ``+`` for candidates.  Every returned dual has the same
    alphabets.
    """
    out = []
    for e in positives:
        members = g.edge_members[g.edge_index(e)]
        rest = g.without_edges([e])
        out.append((e, extend_dual(rest, LinkQuery(members), query_label, drop_isolated=True)))
    for q in candidates:
        out.append(("+".join(sorted(q.members)), extend_dual(g, q, query_label, drop_isolated=True)))
    return out


def dual_to_hgr(d: DualHypergraph) -> str:
    """HGR text with provenance comments (``origin``, ``dummy``, ``query``)."""
    comments = [f"origin {k} {v}" for k, v in d.vertex_origin.items()]
    comments += [f"origin {k} {v}" for k, v in d.edge_origin.items()]
    comments += [f"dummy {k}" for k in d.graph.vertex_ids if k in d.dummy_vertices]
    if d.query_vertex is not None:
        comments.append(f"query {d.query_vertex}")
        comments += [f"modified {e}" for e in d.modified_edges]
    return d.graph.to_hgr(comments)


def parse_dual(text: str | bytes) -> DualHypergraph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    graph = parse_hypergraph(text)
    vorig, eorig, dummies, modified = {}, {}, set(), []
    query = None
    for raw in text.splitlines():
        tok = raw.strip().split()
        if len(tok) < 3 or tok[0] != "#":
            continue
        if tok[1] == "origin" and len(tok) == 4:
            if graph.has_vertex(tok[2]):
                vorig[tok[2]] = tok[3]
            if graph.has_edge(tok[2]):
                eorig[tok[2]] = tok[3]
        elif tok[1] == "dummy":
            dummies.add(tok[2])
        elif tok[1] == "query":
            query = tok[2]
        elif tok[1] == "modified":
            modified.append(tok[2])
    return DualHypergraph(graph, vorig, eorig, frozenset(dummies), query, tuple(modified))
