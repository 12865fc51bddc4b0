import json
import os
import subprocess
import sys

import numpy as np
import pytest

from hyperkernel import _jit, _kernels
from hyperkernel.baselines import _walk_arrays, walk_draws
from hyperkernel.synthetic import random_hypergraph

compiled_only = pytest.mark.skipif(not _jit.USE_NUMBA, reason="numba acceleration is disabled")


def _sorted_rows(a):
    return a[np.lexsort(a.T[::-1])]


@compiled_only
def test_enumeration_compiled_matches_interpreted():
    g = random_hypergraph(14, 20, seed=8, max_cardinality=4)
    args = (*g.adjacency_csr, *g.incidence_csr(min_cardinality=2), *g.member_csr,
            g.vertex_label_codes, g.edge_label_codes, np.arange(g.n_vertices, dtype=np.int64), 4)
    rec_c, conf_c = _kernels.enumerate_occurrences(*args)
    rec_p, conf_p = _kernels.enumerate_occurrences.py_func(*args)
    assert np.array_equal(np.asarray(conf_c), np.asarray(conf_p))
    assert np.array_equal(_sorted_rows(np.asarray(rec_c)), _sorted_rows(np.asarray(rec_p)))


@compiled_only
@pytest.mark.parametrize("cumulative", [False, True])
def test_walk_compiled_matches_interpreted(cumulative):
    g = random_hypergraph(12, 20, seed=2)
    arrays = _walk_arrays(g)
    draws = walk_draws(1, 0, 5, 400)
    a = _kernels.paired_walk_score(*arrays, 0, 5, draws, 0.15, cumulative)
    b = _kernels.paired_walk_score.py_func(*arrays, 0, 5, draws, 0.15, cumulative)
    assert a == b


@compiled_only
def test_smo_compiled_matches_interpreted():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(25, 4))
    K = X @ X.T
    y = np.where(rng.random(25) < 0.5, 1.0, -1.0)
    y[:2] = (1.0, -1.0)
    a = _kernels.smo_solve(K, y, 1.0, 1e-3, 100_000)
    b = _kernels.smo_solve.py_func(K, y, 1.0, 1e-3, 100_000)
    assert a[2] == b[2] and a[3] == b[3]
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-12)


_SCRIPT = r"""
import json, numpy as np
from hyperkernel import _jit, count_all, KernelSpec, svm_train, LabeledDataset, WalkConfig, random_walk_kernel
from hyperkernel.kernels import hypergraphlet_gram
from hyperkernel.synthetic import random_hypergraph
g = random_hypergraph(20, 30, seed=5, max_cardinality=4)
feats = count_all(g, None, 4)
m = hypergraphlet_gram(g, None, KernelSpec(N=4, tau=1))
ids = list(g.vertex_ids)
d = LabeledDataset(ids, [1 if i % 3 == 0 else -1 for i in range(len(ids))])
model = svm_train(m, d)
walk = random_walk_kernel(g, ids[0], ids[1], WalkConfig(total_steps=500, mode="cumulative"))
print(json.dumps({
    "numba": _jit.USE_NUMBA,
    "counts": {v: sorted((c.hex(), n) for c, n in f.counts.items()) for v, f in feats.items()},
    "gram": m.values.tolist(),
    "alpha": model.alpha.tolist(),
    "walk": walk,
}))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("HYPERKERNEL_DISABLE_NUMBA", None)
    if disable:
        env["HYPERKERNEL_DISABLE_NUMBA"] = "1"
    r = subprocess.run([sys.executable, "-c", _SCRIPT], capture_output=True, text=True, env=env, timeout=600)
    assert r.returncode == 0, r.stderr
    return json.loads(r.stdout)


def test_pure_numpy_fallback_matches_compiled():
    fast, slow = _run(False), _run(True)
    assert slow["numba"] is False
    assert fast["counts"] == slow["counts"]
    assert fast["walk"] == slow["walk"]
    assert np.allclose(fast["gram"], slow["gram"], rtol=0, atol=1e-12)
    assert np.allclose(fast["alpha"], slow["alpha"], rtol=0, atol=1e-10)
