"""Time the hot loops with numba compilation on and off.

The interpreted side runs in a child process with HYPERKERNEL_DISABLE_NUMBA=1,
because a compiled dispatcher's ``py_func`` still calls compiled helpers.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--vertices 120]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeat):
    fn()  # warm up (compilation or cache load)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def measure(repeat, vertices):
    from hyperkernel import _jit, _kernels
    from hyperkernel.baselines import _walk_arrays, walk_draws
    from hyperkernel.synthetic import random_hypergraph

    g = random_hypergraph(vertices, int(vertices * 1.5), seed=0, max_cardinality=3)
    count_args = (*g.adjacency_csr, *g.incidence_csr(min_cardinality=2), *g.member_csr,
                  g.vertex_label_codes, g.edge_label_codes, np.arange(g.n_vertices, dtype=np.int64), 4)
    arrays = _walk_arrays(g)
    draws = walk_draws(0, 0, 1, 20_000)
    rng = np.random.default_rng(0)
    X = rng.normal(size=(200, 10))
    K = X @ X.T
    y = np.where(X[:, 0] + 0.5 * rng.normal(size=200) > 0, 1.0, -1.0)

    return {
        "numba": _jit.USE_NUMBA,
        "enumerate N=4": _best(lambda: _kernels.enumerate_occurrences(*count_args), repeat),
        "paired walk 20k steps": _best(lambda: _kernels.paired_walk_score(*arrays, 0, 1, draws, 0.1, False), repeat),
        "smo n=200": _best(lambda: _kernels.smo_solve(K, y, 1.0, 1e-3, 10_000_000), repeat),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--vertices", type=int, default=120)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(measure(args.repeat, args.vertices)))
        return

    runs = {}
    for disabled in (False, True):
        env = dict(os.environ)
        env.pop("HYPERKERNEL_DISABLE_NUMBA", None)
        if disabled:
            env["HYPERKERNEL_DISABLE_NUMBA"] = "1"
        out = subprocess.run(
            [sys.executable, __file__, "--child", "--repeat", str(args.repeat), "--vertices", str(args.vertices)],
            env=env, check=True, capture_output=True, text=True,
        ).stdout
        r = json.loads(out)
        runs["numpy" if disabled else "numba"] = r
    if not runs["numba"].pop("numba"):
        print("warning: numba unavailable, both columns are interpreted", file=sys.stderr)
    runs["numpy"].pop("numba")

    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for key, fast in runs["numba"].items():
        slow = runs["numpy"][key]
        print(f"{key:<24}{fast:>12.4f}{slow:>12.4f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
