"""Labeled hypergraphs, HGR text I/O and structural queries."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, FormatError

__all__ = [
    "Hypergraph",
    "NeighborhoodHypergraph",
    "parse_hypergraph",
    "read_hgr",
    "write_hgr",
]


class Hypergraph:
    """An undirected hypergraph with labeled vertices and labeled hyperedges.

    Vertices and hyperedges keep the order in which they were supplied; that
    order defines the dense integer indices used by all numeric code.  The
    vertex alphabet ``sigma`` and hyperedge alphabet ``xi`` are the sorted
    union of declared and observed symbols.  Instances are immutable.

    Parameters
    ----------
    vertices : iterable of (id, label)
    edges : iterable of (id, label, members)
        ``members`` is an iterable of vertex ids; repeats are rejected.
    sigma, xi : iterable of str, optional
        Extra symbols to declare in the vertex/hyperedge alphabets.
    name : str, optional
    """

    def __init__(
        self,
        vertices: Iterable[tuple[str, str]],
        edges: Iterable[tuple[str, str, Iterable[str]]] = (),
        sigma: Iterable[str] = (),
        xi: Iterable[str] = (),
        name: str | None = None,
    ):
        vids, vlabels = [], []
        vindex: dict[str, int] = {}
        for vid, label in vertices:
            vid, label = str(vid), str(label)
            if vid in vindex:
                raise DataError(f"duplicate vertex id {vid!r}")
            vindex[vid] = len(vids)
            vids.append(vid)
            vlabels.append(label)

        eids, elabels, members = [], [], []
        eindex: dict[str, int] = {}
        for eid, label, mem in edges:
            eid, label = str(eid), str(label)
            if eid in eindex:
                raise DataError(f"duplicate edge id {eid!r}")
            mem = [str(m) for m in mem]
            if not mem:
                raise DataError(f"hyperedge {eid!r} is empty")
            if len(set(mem)) != len(mem):
                raise DataError(f"duplicate member in hyperedge {eid!r}")
            for m in mem:
                if m not in vindex:
                    raise DataError(f"hyperedge {eid!r} references unknown vertex {m!r}")
            eindex[eid] = len(eids)
            eids.append(eid)
            elabels.append(label)
            members.append(tuple(sorted(vindex[m] for m in mem)))

        self.name = name
        self.vertex_ids: tuple[str, ...] = tuple(vids)
        self.vertex_labels: tuple[str, ...] = tuple(vlabels)
        self.edge_ids: tuple[str, ...] = tuple(eids)
        self.edge_labels: tuple[str, ...] = tuple(elabels)
        # member vertex indices per edge, sorted ascending
        self.edge_member_indices: tuple[tuple[int, ...], ...] = tuple(members)
        self.sigma: tuple[str, ...] = tuple(sorted(set(sigma) | set(vlabels)))
        self.xi: tuple[str, ...] = tuple(sorted(set(xi) | set(elabels)))
        for sym in self.sigma + self.xi:
            if not sym or any(c.isspace() for c in sym):
                raise DataError(f"invalid label symbol {sym!r}")
        self._vindex = vindex
        self._eindex = eindex

    # -- basic accessors -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    @cached_property
    def edge_members(self) -> tuple[frozenset[str], ...]:
        ids = self.vertex_ids
        return tuple(frozenset(ids[i] for i in mem) for mem in self.edge_member_indices)

    def vertex_index(self, v: str) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise DataError(f"unknown vertex id {v!r}") from None

    def edge_index(self, e: str) -> int:
        try:
            return self._eindex[e]
        except KeyError:
            raise DataError(f"unknown edge id {e!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._vindex

    def has_edge(self, e: str) -> bool:
        return e in self._eindex

    def vertex_label(self, v: str) -> str:
        return self.vertex_labels[self.vertex_index(v)]

    def edge_label(self, e: str) -> str:
        return self.edge_labels[self.edge_index(e)]

    def vertices(self) -> list[tuple[str, str]]:
        return list(zip(self.vertex_ids, self.vertex_labels))

    def edges(self) -> list[tuple[str, str, frozenset[str]]]:
        return list(zip(self.edge_ids, self.edge_labels, self.edge_members))

    # -- dense array views -------------------------------------------------

    @cached_property
    def vertex_label_codes(self) -> np.ndarray:
        pos = {s: i for i, s in enumerate(self.sigma)}
        return np.array([pos[s] for s in self.vertex_labels], dtype=np.int64)

    @cached_property
    def edge_label_codes(self) -> np.ndarray:
        pos = {s: i for i, s in enumerate(self.xi)}
        return np.array([pos[s] for s in self.edge_labels], dtype=np.int64)

    @cached_property
    def member_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(ptr, idx)``: members of edge ``j`` are ``idx[ptr[j]:ptr[j+1]]``."""
        sizes = [len(m) for m in self.edge_member_indices]
        ptr = np.zeros(self.n_edges + 1, dtype=np.int64)
        np.cumsum(sizes, out=ptr[1:])
        idx = np.fromiter(
            (i for m in self.edge_member_indices for i in m), dtype=np.int64, count=int(ptr[-1])
        )
        return ptr, idx

    def incidence_csr(self, min_cardinality: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """``(ptr, idx)`` mapping vertices to incident edge indices (ascending).

        Only edges with at least ``min_cardinality`` members are listed.
        """
        lists: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for j, mem in enumerate(self.edge_member_indices):
            if len(mem) >= min_cardinality:
                for i in mem:
                    lists[i].append(j)
        return _csr(lists)

    @cached_property
    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted neighbor lists, adjacency via hyperedges of cardinality >= 2."""
        nbrs: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for mem in self.edge_member_indices:
            if len(mem) < 2:
                continue
            for i in mem:
                nbrs[i].update(mem)
        for i, s in enumerate(nbrs):
            s.discard(i)
        return _csr([sorted(s) for s in nbrs])

    # -- structural queries ----------------------------------------------------

    def degree(self, v: str) -> int:
        """Number of hyperedges incident with ``v``."""
        i = self.vertex_index(v)
        return sum(1 for mem in self.edge_member_indices if i in mem)

    def edge_cardinality(self, e: str) -> int:
        return len(self.edge_member_indices[self.edge_index(e)])

    def incident_edges(self, v: str) -> list[str]:
        i = self.vertex_index(v)
        return [self.edge_ids[j] for j, mem in enumerate(self.edge_member_indices) if i in mem]

    def neighbors(self, v: str) -> list[str]:
        ptr, idx = self.adjacency_csr
        i = self.vertex_index(v)
        return [self.vertex_ids[k] for k in idx[ptr[i] : ptr[i + 1]]]

    def distances(self, v: str, radius: int | None = None) -> dict[int, int]:
        """Breadth-first hop distances (vertex index -> distance) from ``v``."""
        start = self.vertex_index(v)
        ptr, idx = self.adjacency_csr
        dist = {start: 0}
        queue = deque([start])
        while queue:
            i = queue.popleft()
            d = dist[i]
            if radius is not None and d >= radius:
                continue
            for k in idx[ptr[i] : ptr[i + 1]]:
                k = int(k)
                if k not in dist:
                    dist[k] = d + 1
                    queue.append(k)
        return dist

    def neighborhood(self, v: str, radius: int) -> "NeighborhoodHypergraph":
        """Restriction to the vertices within ``radius`` hops of ``v``.

        Hyperedges are intersected with the retained vertex set; those whose
        intersection is empty are dropped.  Alphabets are inherited.
        """
        if radius < 0:
            raise DataError("radius must be nonnegative")
        keep = self.distances(v, radius)
        order = sorted(keep)
        verts = [(self.vertex_ids[i], self.vertex_labels[i]) for i in order]
        edges = []
        for j, mem in enumerate(self.edge_member_indices):
            inside = [self.vertex_ids[i] for i in mem if i in keep]
            if inside:
                edges.append((self.edge_ids[j], self.edge_labels[j], inside))
        sub = Hypergraph(verts, edges, sigma=self.sigma, xi=self.xi, name=self.name)
        return NeighborhoodHypergraph(root=v, graph=sub)

    def is_connected(self) -> bool:
        """True iff every pair of vertices is joined by a path."""
        n = self.n_vertices
        if n <= 1:
            return True
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for mem in self.edge_member_indices:
            r0 = find(mem[0])
            for i in mem[1:]:
                r = find(i)
                if r != r0:
                    parent[r] = r0
        root = find(0)
        return all(find(i) == root for i in range(1, n))

    # -- derived hypergraphs ---------------------------------------------------

    def with_vertex_labels(self, labels: Mapping[str, str], sigma: Iterable[str] = ()) -> "Hypergraph":
        """Copy with vertex labels replaced (ids missing from ``labels`` keep theirs)."""
        verts = [(vid, labels.get(vid, lab)) for vid, lab in self.vertices()]
        return Hypergraph(verts, self._edge_triples(), sigma=sigma, xi=self.xi, name=self.name)

    def without_edges(self, edge_ids: Iterable[str]) -> "Hypergraph":
        drop = set(edge_ids)
        for e in drop:
            self.edge_index(e)
        edges = [t for t in self._edge_triples() if t[0] not in drop]
        return Hypergraph(self.vertices(), edges, sigma=self.sigma, xi=self.xi, name=self.name)

    def _edge_triples(self) -> list[tuple[str, str, list[str]]]:
        ids = self.vertex_ids
        return [
            (eid, lab, [ids[i] for i in mem])
            for eid, lab, mem in zip(self.edge_ids, self.edge_labels, self.edge_member_indices)
        ]

    # -- serialization -----------------------------------------------------------

    def to_hgr(self, comments: Sequence[str] = ()) -> str:
        lines = []
        if self.name:
            lines.append(f"t {self.name}")
        for c in comments:
            lines.append(f"# {c}")
        if self.sigma:
            lines.append("sigma " + " ".join(self.sigma))
        if self.xi:
            lines.append("xi " + " ".join(self.xi))
        for vid, lab in self.vertices():
            lines.append(f"v {vid} {lab}")
        for eid, lab, mem in self._edge_triples():
            lines.append(f"e {eid} {lab} " + " ".join(mem))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return (
            f"Hypergraph(name={self.name!r}, |V|={self.n_vertices}, |E|={self.n_edges}, "
            f"|sigma|={len(self.sigma)}, |xi|={len(self.xi)})"
        )

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.vertex_ids == other.vertex_ids
            and self.vertex_labels == other.vertex_labels
            and self.edge_ids == other.edge_ids
            and self.edge_labels == other.edge_labels
            and self.edge_members == other.edge_members
            and self.sigma == other.sigma
            and self.xi == other.xi
        )

    __hash__ = None


@dataclass(frozen=True)
class NeighborhoodHypergraph:
    root: str
    graph: Hypergraph


def _csr(lists: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    np.cumsum([len(x) for x in lists], out=ptr[1:])
    idx = np.fromiter((i for x in lists for i in x), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx


def parse_hypergraph(text: str | bytes, path: str | None = None) -> Hypergraph:
    """Parse HGR text.

    Recognized lines: ``t <name>``, ``sigma <sym>...``, ``xi <sym>...``,
    ``v <id> <label>``, ``e <id> <label> <vid>...``; ``#`` starts a comment.
    Errors carry the offending line number.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    name = None
    sigma: list[str] = []
    xi: list[str] = []
    vertices: list[tuple[str, str]] = []
    vlines: dict[str, int] = {}
    edges: list[tuple[str, str, list[str], int]] = []
    elines: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "t":
            if len(tok) < 2:
                raise FormatError("header line needs a name", lineno, path)
            name = line[1:].strip()
        elif kind == "sigma":
            sigma.extend(tok[1:])
        elif kind == "xi":
            xi.extend(tok[1:])
        elif kind == "v":
            if len(tok) != 3:
                raise FormatError("vertex line must be 'v <id> <label>'", lineno, path)
            if tok[1] in vlines:
                raise FormatError(
                    f"duplicate vertex id {tok[1]!r} (first on line {vlines[tok[1]]})", lineno, path
                )
            vlines[tok[1]] = lineno
            vertices.append((tok[1], tok[2]))
        elif kind == "e":
            if len(tok) < 3:
                raise FormatError("edge line must be 'e <id> <label> <vid>...'", lineno, path)
            if len(tok) == 3:
                raise FormatError(f"empty hyperedge {tok[1]!r}", lineno, path)
            if tok[1] in elines:
                raise FormatError(
                    f"duplicate edge id {tok[1]!r} (first on line {elines[tok[1]]})", lineno, path
                )
            mem = tok[3:]
            if len(set(mem)) != len(mem):
                raise FormatError(f"duplicate member in hyperedge {tok[1]!r}", lineno, path)
            elines[tok[1]] = lineno
            edges.append((tok[1], tok[2], mem, lineno))
        else:
            raise FormatError(f"unrecognized line type {kind!r}", lineno, path)

    for eid, _, mem, lineno in edges:
        for m in mem:
            if m not in vlines:
                raise FormatError(f"hyperedge {eid!r} references unknown vertex {m!r}", lineno, path)
    try:
        return Hypergraph(vertices, [e[:3] for e in edges], sigma=sigma, xi=xi, name=name)
    except DataError as exc:
        raise FormatError(str(exc), None, path) from None


def read_hgr(path: str | Path) -> Hypergraph:
    path = Path(path)
    return parse_hypergraph(path.read_bytes(), path=str(path))


def write_hgr(g: Hypergraph, path: str | Path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(g.to_hgr(comments), encoding="utf-8")
