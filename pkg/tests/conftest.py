import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from hyperkernel import Hypergraph  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DIAMOND_EDGES = {
    "e1": ("v1", "v2"),
    "e2": ("v2", "v3"),
    "e3": ("v1", "v3"),
    "e4": ("v3", "v4"),
    "e5": ("v1", "v4"),
}


def make_graph(vertices, edges, **kw):
    """``vertices``: {id: label}; ``edges``: list of (id, label, members)."""
    return Hypergraph(list(vertices.items()), edges, **kw)


@pytest.fixture
def diamond():
    return make_graph(
        {v: "A" for v in ("v1", "v2", "v3", "v4")},
        [(e, "X", list(m)) for e, m in DIAMOND_EDGES.items()],
    )


@pytest.fixture
def triangle():
    return make_graph(
        {"r": "A", "a": "A", "b": "A"},
        [("ra", "X", ["r", "a"]), ("ab", "X", ["a", "b"]), ("rb", "X", ["r", "b"])],
    )


@st.composite
def hypergraphs(draw, max_vertices=8, max_edges=10, max_card=4, sigma="AB", xi="XY", min_vertices=1):
    n = draw(st.integers(min_vertices, max_vertices))
    vids = [f"n{i}" for i in range(n)]
    labels = draw(st.lists(st.sampled_from(sigma), min_size=n, max_size=n))
    m = draw(st.integers(0, max_edges))
    edges = []
    for k in range(m):
        card = draw(st.integers(1, min(max_card, n)))
        members = draw(st.lists(st.sampled_from(vids), min_size=card, max_size=card, unique=True))
        edges.append((f"h{k}", draw(st.sampled_from(xi)), members))
    return Hypergraph(list(zip(vids, labels)), edges, sigma=tuple(sigma), xi=tuple(xi))
