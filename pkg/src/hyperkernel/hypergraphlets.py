"""Rooted hypergraphlets: canonical codes, base inventory, counting, edit smoothing.

A hypergraphlet of order ``n <= 4`` is stored with vertex indices
``0..n-1`` (index 0 is the root), integer vertex labels (positions in the
sorted vertex alphabet) and hyperedges given as ``(member bitmask, label)``.

The canonical code is a byte string::

    [n, label(0), label(1), ..., label(n-1), mask_1, elabel_1, mask_2, ...]

with hyperedges sorted by mask, minimized over all permutations of the
non-root indices.  Two hypergraphlets get the same code iff they are
isomorphic by a root- and label-preserving isomorphism.
"""

from __future__ import annotations

import itertools
import threading
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import DataError, FormatError
from .hypermodel import Hypergraph

__all__ = [
    "VERTEX_LABEL_SUB",
    "EDGE_LABEL_SUB",
    "EDGE_INDEL",
    "ALL_OPS",
    "RootedHypergraphlet",
    "FeatureVector",
    "canonicalize",
    "decode",
    "describe",
    "enumerate_base",
    "count_hypergraphlets",
    "count_all",
    "edit_neighborhood",
    "apply_edit_smoothing",
    "format_features",
    "write_features",
    "read_features",
]

MAX_ORDER = 4

VERTEX_LABEL_SUB = "vertex-label-sub"
EDGE_LABEL_SUB = "hyperedge-label-sub"
EDGE_INDEL = "hyperedge-indel"
ALL_OPS = frozenset({VERTEX_LABEL_SUB, EDGE_LABEL_SUB, EDGE_INDEL})
_OP_ALIASES = {"vl": VERTEX_LABEL_SUB, "hl": EDGE_LABEL_SUB, "hi": EDGE_INDEL}


def parse_ops(ops: str | Iterable[str] | None) -> frozenset[str]:
    """Normalize an edit-operation selection.

    Accepts full names, the short forms ``vl``/``hl``/``hi``, ``all``, or a
    comma separated string of those.
    """
    if ops is None:
        return ALL_OPS
    if isinstance(ops, str):
        ops = [o for o in ops.split(",") if o]
    out = set()
    for o in ops:
        o = o.strip()
        if o == "all":
            out |= ALL_OPS
            continue
        o = _OP_ALIASES.get(o, o)
        if o not in ALL_OPS:
            raise DataError(f"unknown edit operation {o!r}")
        out.add(o)
    return frozenset(out)


def _bits(mask: int) -> list[int]:
    return [i for i in range(MAX_ORDER) if mask >> i & 1]


def _edge_masks(n: int) -> list[int]:
    """All member bitmasks of cardinality >= 2 over ``n`` vertices."""
    return [m for m in range(1, 1 << n) if bin(m).count("1") >= 2]


def _connected(n: int, masks: Iterable[int]) -> bool:
    masks = list(masks)
    reach = 1
    changed = True
    while changed:
        changed = False
        for m in masks:
            if m & reach and m | reach != reach:
                reach |= m
                changed = True
    return reach == (1 << n) - 1


def _perm_tables(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Root-fixing permutations as ``(p, maskmap)`` with ``p[old] = new``."""
    tables = []
    for rest in itertools.permutations(range(1, n)):
        p = (0,) + rest
        maskmap = tuple(
            sum(1 << p[i] for i in range(n) if m >> i & 1) for m in range(1 << MAX_ORDER)
        )
        tables.append((p, maskmap))
    return tables


_PERMS = {n: _perm_tables(n) for n in range(1, MAX_ORDER + 1)}


@dataclass(frozen=True)
class RootedHypergraphlet:
    """Small rooted hypergraph with integer labels; index 0 is the root."""

    order: int
    vertex_labels: tuple[int, ...]
    hyperedges: tuple[tuple[int, int], ...]  # (member bitmask, label), sorted by mask

    @classmethod
    def build(cls, order, vertex_labels, hyperedges) -> "RootedHypergraphlet":
        """Construct from ``hyperedges`` given as ``(members, label)`` pairs.

        ``members`` may be a bitmask or an iterable of vertex indices.
        """
        edges = []
        for members, label in hyperedges:
            if not isinstance(members, int):
                members = sum(1 << i for i in set(members))
            edges.append((members, int(label)))
        h = cls(int(order), tuple(int(x) for x in vertex_labels), tuple(sorted(edges)))
        h.validate()
        return h

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.hyperedges)

    def edge_sets(self) -> list[tuple[frozenset[int], int]]:
        return [(frozenset(_bits(m)), lab) for m, lab in self.hyperedges]

    def is_valid(self) -> bool:
        n = self.order
        if not 1 <= n <= MAX_ORDER or len(self.vertex_labels) != n:
            return False
        masks = self.masks
        if len(set(masks)) != len(masks):
            return False
        if any(m >> n or bin(m).count("1") < 2 for m in masks):
            return False
        return _connected(n, masks)

    def validate(self) -> None:
        if not self.is_valid():
            raise DataError(f"not a valid hypergraphlet: {self}")

    def relabeled(self, p: Sequence[int]) -> "RootedHypergraphlet":
        """Apply the index permutation ``p`` (``p[old] = new``)."""
        n = self.order
        labels = [0] * n
        for old in range(n):
            labels[p[old]] = self.vertex_labels[old]
        edges = sorted(
            (sum(1 << p[i] for i in range(n) if m >> i & 1), lab) for m, lab in self.hyperedges
        )
        return RootedHypergraphlet(n, tuple(labels), tuple(edges))


def _code_from_parts(n, vlabels, edges) -> bytes:
    best = None
    for p, maskmap in _PERMS[n]:
        labels = [0] * n
        for old in range(n):
            labels[p[old]] = vlabels[old]
        code = [n, *labels]
        for m, lab in sorted((maskmap[m], lab) for m, lab in edges):
            code.append(m)
            code.append(lab)
        c = bytes(code)
        if best is None or c < best:
            best = c
    return best


def canonicalize(h: RootedHypergraphlet) -> bytes:
    """Canonical code of ``h`` (labels must be < 256)."""
    return _code_from_parts(h.order, h.vertex_labels, h.hyperedges)


def decode(code: bytes) -> RootedHypergraphlet:
    n = code[0]
    labels = tuple(code[1 : 1 + n])
    rest = code[1 + n :]
    if len(rest) % 2:
        raise DataError(f"malformed hypergraphlet code {code.hex()}")
    edges = tuple((rest[i], rest[i + 1]) for i in range(0, len(rest), 2))
    return RootedHypergraphlet(n, labels, edges)


def code_order(code: bytes) -> int:
    return code[0]


def describe(code: bytes, sigma: Sequence[str] | None = None, xi: Sequence[str] | None = None) -> str:
    """Readable form, e.g. ``n=3 labels=A,B,B edges={0,1}:X,{0,2}:X``."""
    h = decode(code)
    vs = [sigma[i] if sigma else str(i) for i in h.vertex_labels]
    es = [
        "{" + ",".join(map(str, _bits(m))) + "}:" + (xi[lab] if xi else str(lab))
        for m, lab in h.hyperedges
    ]
    return f"n={h.order} labels={','.join(vs)} edges={','.join(es) or '-'}"


@lru_cache(maxsize=None)
def _base_codes(n: int) -> tuple[bytes, ...]:
    codes = set()
    masks = _edge_masks(n)
    for r in range(len(masks) + 1):
        for subset in itertools.combinations(masks, r):
            if _connected(n, subset):
                codes.add(_code_from_parts(n, (0,) * n, [(m, 0) for m in subset]))
    return tuple(sorted(codes))


def enumerate_base(n: int) -> list[RootedHypergraphlet]:
    """All unlabeled hypergraphlets of order ``n``, in canonical-code order.

    Position ``i`` in the list is the structure's stable index ``n_{i+1}``.
    """
    if not 1 <= n <= MAX_ORDER:
        raise DataError(f"hypergraphlet order must be in 1..{MAX_ORDER}, got {n}")
    return [decode(c) for c in _base_codes(n)]


# -- feature vectors ---------------------------------------------------------


@dataclass
class FeatureVector:
    """Sparse hypergraphlet counts for one rooted example.

    ``counts`` maps canonical codes to nonzero weights; label indices in
    the codes refer to ``sigma``/``xi``.
    """

    counts: dict[bytes, float]
    sigma: tuple[str, ...]
    xi: tuple[str, ...]
    max_order: int = MAX_ORDER
    conflicts: int = 0

    def restricted(self, max_order: int) -> "FeatureVector":
        counts = {c: v for c, v in self.counts.items() if c[0] <= max_order}
        return FeatureVector(counts, self.sigma, self.xi, min(max_order, self.max_order), self.conflicts)

    def by_order(self) -> dict[int, dict[bytes, float]]:
        out: dict[int, dict[bytes, float]] = defaultdict(dict)
        for c, v in self.counts.items():
            out[c[0]][c] = v
        return dict(out)

    def total(self, order: int | None = None) -> float:
        return sum(v for c, v in self.counts.items() if order is None or c[0] == order)

    def __len__(self):
        return len(self.counts)


_record_cache: dict[bytes, bytes] = {}
_record_lock = threading.Lock()


def _record_code(row: np.ndarray) -> bytes:
    key = row.tobytes()
    code = _record_cache.get(key)
    if code is None:
        n = int(row[0])
        labels = [int(x) for x in row[1 : 1 + n]]
        slots = row[_kernels.REC_SLOTS - 1 :]
        edges = [(m, int(slots[m])) for m in range(16) if slots[m] >= 0]
        code = _code_from_parts(n, labels, edges)
        with _record_lock:
            _record_cache[key] = code
    return code


def _check_alphabets(g: Hypergraph) -> None:
    if len(g.sigma) > 255 or len(g.xi) > 255:
        raise DataError("hypergraphlet codes support at most 255 symbols per alphabet")


def _count_chunk(g: Hypergraph, roots: np.ndarray, max_order: int):
    adj_ptr, adj_idx = g.adjacency_csr
    inc_ptr, inc_idx = g.incidence_csr(min_cardinality=2)
    mem_ptr, mem_idx = g.member_csr
    records, conflicts = _kernels.enumerate_occurrences(
        adj_ptr, adj_idx, inc_ptr, inc_idx, mem_ptr, mem_idx,
        g.vertex_label_codes, g.edge_label_codes, roots, max_order,
    )
    counts: list[dict[bytes, int]] = [defaultdict(int) for _ in range(len(roots))]
    if len(records):
        rows, mult = np.unique(records, axis=0, return_counts=True)
        for row, m in zip(rows, mult):
            counts[int(row[0])][_record_code(row[1:])] += int(m)
    return counts, conflicts


def count_all(
    g: Hypergraph,
    roots: Sequence[str] | None = None,
    max_order: int = MAX_ORDER,
    threads: int = 1,
    chunk: int = 64,
) -> dict[str, FeatureVector]:
    """Hypergraphlet counts for every root (default: all vertices).

    Work is split into chunks of roots; with ``threads > 1`` chunks run on
    a thread pool.  The result does not depend on the thread count.
    """
    if not 1 <= max_order <= MAX_ORDER:
        raise DataError(f"max order must be in 1..{MAX_ORDER}, got {max_order}")
    _check_alphabets(g)
    if roots is None:
        roots = g.vertex_ids
    idx = np.array([g.vertex_index(v) for v in roots], dtype=np.int64)
    parts = [idx[i : i + chunk] for i in range(0, len(idx), chunk)]
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _count_chunk(g, p, max_order), parts))
    else:
        results = [_count_chunk(g, p, max_order) for p in parts]
    out = {}
    k = 0
    for counts, conflicts in results:
        for c, nconf in zip(counts, conflicts):
            out[roots[k]] = FeatureVector(dict(sorted(c.items())), g.sigma, g.xi, max_order, int(nconf))
            k += 1
    return out


def count_hypergraphlets(g: Hypergraph, v: str, max_order: int = MAX_ORDER) -> FeatureVector:
    """Counts of induced rooted hypergraphlets of order <= ``max_order`` at ``v``.

    One occurrence per vertex set containing ``v`` whose induced
    sub-hypergraph (hyperedges lying fully inside the set, cardinality >= 2)
    is connected.  Repeated member sets inside an occurrence collapse to the
    first-listed hyperedge; label clashes are tallied in ``conflicts``.
    """
    return count_all(g, [v], max_order)[v]


# -- edit neighborhoods ------------------------------------------------------


def _single_edits(h: RootedHypergraphlet, ops: frozenset[str], ns: int, nx: int):
    n = h.order
    vl = h.vertex_labels
    edges = dict(h.hyperedges)
    if VERTEX_LABEL_SUB in ops:
        for i in range(n):
            for s in range(ns):
                if s != vl[i]:
                    yield _code_from_parts(n, vl[:i] + (s,) + vl[i + 1 :], h.hyperedges)
    if EDGE_LABEL_SUB in ops:
        for m, lab in h.hyperedges:
            for x in range(nx):
                if x != lab:
                    yield _code_from_parts(n, vl, [(mm, x if mm == m else ll) for mm, ll in h.hyperedges])
    if EDGE_INDEL in ops:
        for m in edges:
            rest = [(mm, ll) for mm, ll in h.hyperedges if mm != m]
            if _connected(n, [mm for mm, _ in rest]):
                yield _code_from_parts(n, vl, rest)
        for m in _edge_masks(n):
            if m not in edges:
                for x in range(nx):
                    yield _code_from_parts(n, vl, list(h.hyperedges) + [(m, x)])


@lru_cache(maxsize=None)
def _neighborhood(code: bytes, tau: int, ops: frozenset[str], ns: int, nx: int) -> tuple[tuple[bytes, int], ...]:
    if tau == 0 or not ops:
        return ((code, 0),)
    prev = dict(_neighborhood(code, tau - 1, ops, ns, nx))
    frontier = [c for c, d in prev.items() if d == tau - 1]
    best = dict(prev)
    for c in frontier:
        for nb in _step(c, ops, ns, nx):
            if nb not in best:
                best[nb] = tau
    return tuple(sorted(best.items(), key=lambda t: (t[1], t[0])))


@lru_cache(maxsize=None)
def _step(code: bytes, ops: frozenset[str], ns: int, nx: int) -> frozenset[bytes]:
    return frozenset(_single_edits(decode(code), ops, ns, nx))


def _check_code(code: bytes, ns: int, nx: int) -> None:
    h = decode(code)
    if any(x >= ns for x in h.vertex_labels) or any(lab >= nx for _, lab in h.hyperedges):
        raise DataError(f"code {code.hex()} uses labels outside the given alphabets")
    h.validate()


def edit_neighborhood(
    code: bytes,
    tau: int,
    ops: Iterable[str] | str | None,
    sigma: Sequence[str] | int,
    xi: Sequence[str] | int,
) -> list[tuple[bytes, int]]:
    """Hypergraphlets within edit cost ``tau`` of ``code``, with their minimal cost.

    Unit-cost operations: vertex label substitution, hyperedge label
    substitution, hyperedge insertion/deletion.  Every intermediate
    structure must itself be a valid hypergraphlet (connected, simple, same
    order).  The input is included at cost 0.
    """
    if tau < 0:
        raise DataError("edit budget must be nonnegative")
    ops = parse_ops(ops)
    ns = sigma if isinstance(sigma, int) else len(sigma)
    nx = xi if isinstance(xi, int) else len(xi)
    _check_code(code, ns, nx)
    return list(_neighborhood(code, tau, ops, ns, nx))


def apply_edit_smoothing(
    fv: FeatureVector,
    tau: int,
    ops: Iterable[str] | str | None = None,
    weight: Callable[[bytes, bytes], float] | None = None,
) -> FeatureVector:
    """Spread every observed count over its edit neighborhood.

    Output entry ``i`` is the sum of ``weight(i, j) * fv[j]`` over observed
    ``j`` within cost ``tau`` of ``i``; ``weight=None`` means unit weights
    (counts stay integral).
    """
    if tau == 0:
        return fv
    ops = parse_ops(ops)
    ns, nx = len(fv.sigma), len(fv.xi)
    acc: dict[bytes, float] = defaultdict(int)
    for j, cnt in fv.counts.items():
        for i, _ in _neighborhood(j, tau, ops, ns, nx):
            acc[i] += cnt if weight is None else weight(i, j) * cnt
    counts = {c: v for c, v in sorted(acc.items()) if v != 0}
    return FeatureVector(counts, fv.sigma, fv.xi, fv.max_order, fv.conflicts)


# -- text format -------------------------------------------------------------


def _fmt_count(v) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def format_features(features: Mapping[str, FeatureVector], inline_header: bool = False) -> tuple[str, str]:
    """Feature file text and its ``.codes`` sidecar text.

    The alphabet header goes to the sidecar, so the feature file holds one
    line per root; ``inline_header`` keeps it in the feature text instead.
    """
    if not features:
        raise DataError("no feature vectors to write")
    first = next(iter(features.values()))
    header = [
        "# sigma " + " ".join(first.sigma),
        "# xi " + " ".join(first.xi),
        f"# max_order {first.max_order}",
    ]
    lines = list(header) if inline_header else []
    seen: set[bytes] = set()
    for vid, fv in features.items():
        if fv.sigma != first.sigma or fv.xi != first.xi:
            raise DataError(f"feature vector {vid!r} uses different alphabets")
        seen.update(fv.counts)
        items = " ".join(f"{c.hex()}:{_fmt_count(v)}" for c, v in fv.counts.items())
        lines.append(f"{vid} {items}".rstrip())
    side = header + [f"{c.hex()}\t{describe(c, first.sigma, first.xi)}" for c in sorted(seen)]
    return "\n".join(lines) + "\n", "\n".join(side) + "\n"


def write_features(path: str | Path, features: Mapping[str, FeatureVector]) -> None:
    """Write ``<root-id> <code-hex>:<count> ...`` lines plus a ``.codes`` sidecar."""
    text, side = format_features(features)
    Path(path).write_text(text, encoding="utf-8")
    Path(str(path) + ".codes").write_text(side, encoding="utf-8")


def _read_header(lines, meta):
    for raw in lines:
        tok = raw.strip()[1:].split() if raw.startswith("#") else None
        if not tok:
            continue
        if tok[0] == "sigma":
            meta["sigma"] = tuple(tok[1:])
        elif tok[0] == "xi":
            meta["xi"] = tuple(tok[1:])
        elif tok[0] == "max_order" and len(tok) == 2:
            meta["max_order"] = int(tok[1])


def read_features(path: str | Path) -> dict[str, FeatureVector]:
    """Inverse of :func:`write_features`; the header may sit in either file."""
    path = Path(path)
    meta = {"sigma": (), "xi": (), "max_order": MAX_ORDER}
    side = Path(str(path) + ".codes")
    if side.exists():
        _read_header(side.read_text(encoding="utf-8").splitlines(), meta)
    lines = path.read_text(encoding="utf-8").splitlines()
    _read_header(lines, meta)
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        counts = {}
        try:
            for item in tok[1:]:
                hexcode, val = item.rsplit(":", 1)
                v = float(val)
                counts[bytes.fromhex(hexcode)] = int(v) if v.is_integer() else v
        except ValueError as exc:
            raise FormatError(f"bad feature entry: {exc}", lineno, str(path)) from None
        if tok[0] in out:
            raise FormatError(f"duplicate root id {tok[0]!r}", lineno, str(path))
        out[tok[0]] = FeatureVector(counts, meta["sigma"], meta["xi"], meta["max_order"])
    return out
