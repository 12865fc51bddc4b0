"""Seeded generators: random hypergraphs and a planted-motif benchmark."""

from __future__ import annotations

import numpy as np

from .hypermodel import Hypergraph

__all__ = ["random_hypergraph", "planted_motif_benchmark"]


def random_hypergraph(
    n_vertices: int,
    n_edges: int,
    seed: int = 0,
    sigma: tuple[str, ...] = ("A", "B"),
    xi: tuple[str, ...] = ("X", "Y"),
    max_cardinality: int = 3,
    min_cardinality: int = 2,
    prefix: str = "v",
) -> Hypergraph:
    """Uniform random hyperedges with distinct member sets."""
    rng = np.random.default_rng(seed)
    width = len(str(max(n_vertices - 1, 0)))
    vids = [f"{prefix}{i:0{width}d}" for i in range(n_vertices)]
    vertices = [(v, sigma[int(rng.integers(len(sigma)))]) for v in vids]
    hi = min(max_cardinality, n_vertices)
    seen = set()
    edges = []
    attempts = 0
    while len(edges) < n_edges and attempts < 50 * (n_edges + 1):
        attempts += 1
        k = int(rng.integers(min_cardinality, hi + 1))
        members = frozenset(int(x) for x in rng.choice(n_vertices, size=k, replace=False))
        if members in seen:
            continue
        seen.add(members)
        label = xi[int(rng.integers(len(xi)))]
        edges.append((f"e{len(edges)}", label, [vids[i] for i in sorted(members)]))
    return Hypergraph(vertices, edges, sigma=sigma, xi=xi, name=f"random-{seed}")


def planted_motif_benchmark(
    n_vertices: int = 500,
    n_motifs: int = 80,
    mean_degree: float = 2.0,
    seed: int = 0,
    sigma: tuple[str, ...] = ("A", "B", "C", "D"),
) -> tuple[Hypergraph, dict[str, int]]:
    """Background pair edges (label X) plus planted triple hyperedges (label Y).

    A vertex is positive iff it belongs to a planted triple, so its class
    is visible only through local hypergraph structure.  Vertex labels are
    drawn independently of the class.
    """
    if 3 * n_motifs > n_vertices:
        raise ValueError("too many motifs for the vertex count")
    rng = np.random.default_rng(seed)
    vids = [f"v{i:03d}" for i in range(n_vertices)]
    vertices = [(v, sigma[int(rng.integers(len(sigma)))]) for v in vids]
    # a random spanning tree keeps the background connected
    order = rng.permutation(n_vertices)
    pairs = set()
    for t in range(1, n_vertices):
        a, b = int(order[t]), int(order[rng.integers(t)])
        pairs.add((min(a, b), max(a, b)))
    target = int(round(mean_degree * n_vertices / 2))
    while len(pairs) < target:
        a, b = (int(x) for x in rng.choice(n_vertices, size=2, replace=False))
        pairs.add((min(a, b), max(a, b)))
    edges = [(f"x{k}", "X", [vids[a], vids[b]]) for k, (a, b) in enumerate(sorted(pairs))]
    carriers = rng.choice(n_vertices, size=3 * n_motifs, replace=False)
    labels = {v: -1 for v in vids}
    for k in range(n_motifs):
        trio = sorted(int(x) for x in carriers[3 * k: 3 * k + 3])
        edges.append((f"y{k}", "Y", [vids[i] for i in trio]))
        for i in trio:
            labels[vids[i]] = 1
    g = Hypergraph(vertices, edges, sigma=sigma, xi=("X", "Y"), name=f"planted-{seed}")
    return g, labels
