"""Slow, independent reference implementations used by the test suite.

Nothing here imports the package's algorithms; inputs are plain Python
structures (or a Hypergraph read through its public accessors only).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque

import numpy as np

# -- hypergraphlet codes --------------------------------------------------------


def brute_canon(n, vlabels, edges):
    """Minimal ``(labels, sorted edges)`` over all root-fixing relabelings.

    ``edges`` is an iterable of ``(member index collection, label)``.
    """
    best = None
    for rest in itertools.permutations(range(1, n)):
        p = (0,) + rest
        lab = [None] * n
        for old in range(n):
            lab[p[old]] = vlabels[old]
        es = sorted((tuple(sorted(p[i] for i in m)), x) for m, x in edges)
        key = (n, tuple(lab), tuple(es))
        if best is None or key < best:
            best = key
    return best


def key_from_code(code: bytes, sigma=None, xi=None):
    """Read the package byte layout without using its decoder.

    With alphabets given, label indices are mapped back to symbols.
    """
    n = code[0]
    labels = [sigma[i] if sigma else i for i in code[1 : 1 + n]]
    rest = code[1 + n :]
    edges = []
    for i in range(0, len(rest), 2):
        mask, lab = rest[i], rest[i + 1]
        edges.append(([b for b in range(4) if mask >> b & 1], xi[lab] if xi else lab))
    return brute_canon(n, labels, edges)


def connected_sets(n, edges, size):
    """Union-find connectivity of ``size`` vertices under member sets."""
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in edges:
        m = list(m)
        for a in m[1:]:
            ra, rb = find(m[0]), find(a)
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(size)}) <= 1


def all_labeled(n, ns, nx):
    """Every labeling of every connected simple hypergraph on ``n`` indices."""
    subsets = [c for k in range(2, n + 1) for c in itertools.combinations(range(n), k)]
    for r in range(len(subsets) + 1):
        for es in itertools.combinations(subsets, r):
            if not connected_sets(n, es, n):
                continue
            for vl in itertools.product(range(ns), repeat=n):
                for el in itertools.product(range(nx), repeat=len(es)):
                    yield vl, list(zip(es, el))


def distinct_labeled(n, ns, nx) -> int:
    return len({brute_canon(n, vl, es) for vl, es in all_labeled(n, ns, nx)})


# -- counting ------------------------------------------------------------------


def _host(g):
    idx = {v: i for i, v in enumerate(g.vertex_ids)}
    vl = [g.vertex_label(v) for v in g.vertex_ids]
    edges = [(frozenset(idx[m] for m in members), lab) for _, lab, members in g.edges()]
    return idx, vl, edges


def subset_counts(g, root, N):
    """All vertex subsets containing ``root`` whose induced hypergraph is connected."""
    idx, vl, edges = _host(g)
    r = idx[root]
    others = [i for i in range(len(vl)) if i != r]
    out = Counter()
    for k in range(0, N):
        for rest in itertools.combinations(others, k):
            S = (r,) + rest
            pos = {v: i for i, v in enumerate(S)}
            kept = {}
            for m, lab in edges:
                if len(m) >= 2 and m <= set(S):
                    key = frozenset(pos[x] for x in m)
                    kept.setdefault(key, lab)  # first listed wins
            if not connected_sets(len(S), kept, len(S)):
                continue
            out[brute_canon(len(S), [vl[v] for v in S], list(kept.items()))] += 1
    return out


def connected_subset_totals(g, root, N):
    """Number of connected induced vertex sets of each size containing ``root``."""
    return Counter(key[0] for key in subset_counts(g, root, N).elements())


# -- structure ---------------------------------------------------------------


def bfs_ball(g, v, radius):
    adj = {x: set() for x in g.vertex_ids}
    for _, _, m in g.edges():
        for a in m:
            adj[a] |= set(m) - {a}
    dist = {v: 0}
    q = deque([v])
    while q:
        x = q.popleft()
        if dist[x] == radius:
            continue
        for y in sorted(adj[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return set(dist)


def union_find_connected(g):
    ids = list(g.vertex_ids)
    if len(ids) <= 1:
        return True
    idx = {v: i for i, v in enumerate(ids)}
    return connected_sets(len(ids), [[idx[m] for m in members] for _, _, members in g.edges()], len(ids))


def incidence_transpose(g):
    """``{vertex: set of incident edge ids}`` from a linear scan."""
    out = {v: set() for v in g.vertex_ids}
    for eid, _, members in g.edges():
        for m in members:
            out[m].add(eid)
    return out


def labeled_bipartite(g):
    import networkx as nx

    b = nx.Graph()
    for v in g.vertex_ids:
        b.add_node(("v", v), kind="v", label=g.vertex_label(v))
    for eid, lab, members in g.edges():
        b.add_node(("e", eid), kind="e", label=lab)
        for m in members:
            b.add_edge(("e", eid), ("v", m))
    return b


def isomorphic(g, h):
    import networkx as nx

    return nx.is_isomorphic(
        labeled_bipartite(g), labeled_bipartite(h),
        node_match=lambda a, b: a["kind"] == b["kind"] and a["label"] == b["label"],
    )


# -- kernels -----------------------------------------------------------------


def dense_gram(vectors, normalize):
    keys = sorted({k for v in vectors for k in v})
    X = np.array([[float(v.get(k, 0)) for k in keys] for v in vectors])
    K = X @ X.T
    if normalize:
        d = np.sqrt(np.diag(K))
        K = K / np.outer(d, d)
    return K


def pair_kernel_loops(pairs, seqs, k, normalize):
    def spec(s):
        return Counter(s[i : i + k] for i in range(len(s) - k + 1))

    feats = {i: spec(s) for i, s in seqs.items()}

    def base(a, b):
        fa, fb = feats[a], feats[b]
        dot = sum(fa[x] * fb[x] for x in fa)
        na = math.sqrt(sum(c * c for c in fa.values()))
        nb = math.sqrt(sum(c * c for c in fb.values()))
        return dot / (na * nb)

    n = len(pairs)
    K = np.zeros((n, n))
    for i, (_, a, b) in enumerate(pairs):
        for j, (_, c, d) in enumerate(pairs):
            K[i, j] = base(a, c) * base(b, d) + base(a, d) * base(b, c)
    if normalize:
        dd = np.sqrt(np.diag(K))
        K = K / np.outer(dd, dd)
    return K


# -- random walks ------------------------------------------------------------


def replay_walk(g, u, v, draws, restart, cumulative, stay=False, avoid=False):
    """Pure-Python re-simulation consuming the same uniforms."""
    inc = {x: [] for x in g.vertex_ids}
    ed = list(g.edges())
    for k, (_, _, members) in enumerate(ed):
        if len(members) >= 2:
            for m in members:
                inc[m].append(k)
    order = {x: i for i, x in enumerate(g.vertex_ids)}

    def step(x, prev, r1, r2):
        es = inc[x]
        if avoid and prev is not None and len(es) > 1:
            es = [e for e in es if e != prev]
        e = es[min(int(r1 * len(es)), len(es) - 1)]
        dest = sorted((m for m in ed[e][2] if stay or m != x), key=order.get)
        return e, dest[min(int(r2 * len(dest)), len(dest) - 1)]

    vl = g.vertex_label
    score = 0
    x, y, px, py = u, v, None, None
    ok = vl(u) == vl(v)
    length = 0
    for row in draws:
        ex, nx_ = step(x, px, row[0], row[1])
        ey, ny = step(y, py, row[2], row[3])
        se = ed[ex][1] == ed[ey][1]
        sv = vl(nx_) == vl(ny)
        if cumulative:
            score += 1 if (se or sv) else 0
        else:
            ok = ok and se and sv
        length += 1
        x, y, px, py = nx_, ny, ex, ey
        if row[4] < restart:
            if not cumulative and ok:
                score += 1
            x, y, px, py, ok, length = u, v, None, None, vl(u) == vl(v), 0
    if length and not cumulative and ok:
        score += 1
    return float(score)


# -- SVM ---------------------------------------------------------------------


def qp_dual(K, y, C):
    """Maximized soft-margin dual objective from cvxopt."""
    from cvxopt import matrix, solvers

    n = len(y)
    P = matrix(np.outer(y, y) * K)
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), C * np.ones(n)]))
    A = matrix(y.reshape(1, -1).astype(float))
    b = matrix(0.0)
    solvers.options.update({"show_progress": False, "abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12})
    sol = solvers.qp(P, q, G, h, A, b)
    a = np.array(sol["x"]).ravel()
    return float(a.sum() - 0.5 * (a * y) @ K @ (a * y)), a


def auc_pairs(scores, labels):
    pos = [s for s, t in zip(scores, labels) if t > 0]
    neg = [s for s, t in zip(scores, labels) if t <= 0]
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


# -- Polya -----------------------------------------------------------------


def burnside_count(n, masks, ns, nx):
    """Average number of labelings fixed by each root-fixing automorphism."""
    mset = set(masks)
    fixed_total = 0
    group = 0
    for rest in itertools.permutations(range(1, n)):
        p = (0,) + rest
        image = {m: sum(1 << p[i] for i in range(n) if m >> i & 1) for m in masks}
        if set(image.values()) != mset:
            continue
        group += 1
        vcycles = _cycles(list(p))
        epos = {m: k for k, m in enumerate(masks)}
        ecycles = _cycles([epos[image[m]] for m in masks])
        fixed_total += ns ** vcycles * nx ** ecycles
    return fixed_total // group, fixed_total % group


def _cycles(perm):
    seen = [False] * len(perm)
    c = 0
    for s in range(len(perm)):
        if not seen[s]:
            c += 1
            i = s
            while not seen[i]:
                seen[i] = True
                i = perm[i]
    return c


def labelings_of(n, masks, ns, nx):
    """Distinct canonical forms over every labeling of one base structure."""
    edges = [[b for b in range(n) if m >> b & 1] for m in masks]
    seen = set()
    for vl in itertools.product(range(ns), repeat=n):
        for el in itertools.product(range(nx), repeat=len(edges)):
            seen.add(brute_canon(n, vl, list(zip(edges, el))))
    return len(seen)


# -- edit distance -------------------------------------------------------------


def single_edit_keys(key, ns, nx, ops):
    """Brute canonical forms one unit edit away (validity enforced)."""
    n, vl, es = key
    es = list(es)
    out = set()
    if "vertex-label-sub" in ops:
        for i in range(n):
            for s in range(ns):
                if s != vl[i]:
                    out.add(brute_canon(n, vl[:i] + (s,) + vl[i + 1 :], es))
    if "hyperedge-label-sub" in ops:
        for k, (m, x) in enumerate(es):
            for y in range(nx):
                if y != x:
                    out.add(brute_canon(n, vl, es[:k] + [(m, y)] + es[k + 1 :]))
    if "hyperedge-indel" in ops:
        members = {m for m, _ in es}
        for k in range(len(es)):
            rest = es[:k] + es[k + 1 :]
            if connected_sets(n, [m for m, _ in rest], n):
                out.add(brute_canon(n, vl, rest))
        for r in range(2, n + 1):
            for m in itertools.combinations(range(n), r):
                if m not in members:
                    for y in range(nx):
                        out.add(brute_canon(n, vl, es + [(m, y)]))
    return out


def brute_neighborhood(key, tau, ns, nx, ops):
    dist = {key: 0}
    frontier = [key]
    for t in range(1, tau + 1):
        nxt = []
        for k in frontier:
            for nb in single_edit_keys(k, ns, nx, ops):
                if nb not in dist:
                    dist[nb] = t
                    nxt.append(nb)
        frontier = nxt
    return dist
