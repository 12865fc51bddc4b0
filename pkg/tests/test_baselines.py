import numpy as np
import pytest

from conftest import make_graph
from hyperkernel import DataError, FormatError, SequenceRecord, WalkConfig, pairwise_spectrum_kernel, random_walk_kernel
from hyperkernel.baselines import read_fasta, random_walk_gram, spectrum_features, spectrum_gram, walk_draws
from hyperkernel.synthetic import random_hypergraph

import oracles


@pytest.mark.parametrize("mode", ["exact", "cumulative"])
@pytest.mark.parametrize("seed", range(4))
def test_walk_matches_replay(mode, seed):
    g = random_hypergraph(15, 25, seed=seed, max_cardinality=4)
    walkable = [v for v in g.vertex_ids if any(len(m) >= 2 and v in m for m in g.edge_members)]
    u, v = walkable[0], walkable[-1]
    cfg = WalkConfig(total_steps=500, restart_prob=0.2, seed=seed, mode=mode)
    draws = walk_draws(seed, g.vertex_index(u), g.vertex_index(v), 500)
    want = oracles.replay_walk(g, u, v, draws, 0.2, mode == "cumulative")
    assert random_walk_kernel(g, u, v, cfg) == want


@pytest.mark.parametrize("stay, avoid", [(True, False), (False, True), (True, True)])
def test_walk_options_match_replay(stay, avoid):
    g = random_hypergraph(15, 25, seed=7, max_cardinality=4)
    walkable = [v for v in g.vertex_ids if any(len(m) >= 2 and v in m for m in g.edge_members)]
    u, v = walkable[1], walkable[-2]
    for mode in ("exact", "cumulative"):
        cfg = WalkConfig(total_steps=800, restart_prob=0.1, seed=3, mode=mode, allow_stay=stay, avoid_arrival=avoid)
        draws = walk_draws(3, g.vertex_index(u), g.vertex_index(v), 800)
        want = oracles.replay_walk(g, u, v, draws, 0.1, mode == "cumulative", stay, avoid)
        assert random_walk_kernel(g, u, v, cfg) == want


def test_walk_is_deterministic_and_seeded():
    g = random_hypergraph(15, 25, seed=1)
    cfg = WalkConfig(total_steps=2000, seed=5, mode="cumulative")
    a = random_walk_kernel(g, "v00", "v03", cfg)
    assert a == random_walk_kernel(g, "v00", "v03", cfg)
    assert a != random_walk_kernel(g, "v00", "v03", WalkConfig(total_steps=2000, seed=6, mode="cumulative"))


def test_symmetrized_walk():
    g = random_hypergraph(12, 20, seed=3)
    cfg = WalkConfig(total_steps=1000)
    assert random_walk_kernel(g, "v01", "v05", cfg, symmetrize=True) == random_walk_kernel(
        g, "v05", "v01", cfg, symmetrize=True)
    m = random_walk_gram(g, list(g.vertex_ids[:6]), cfg)
    assert np.array_equal(m.values, m.values.T)
    assert np.all(np.diag(m.values) == 1.0)


def test_identical_roots_exact_walk_always_matches():
    g = make_graph({"a": "A", "b": "B"}, [("e", "X", ["a", "b"])])
    cfg = WalkConfig(total_steps=300, restart_prob=0.5)
    # both walks are forced along the same edge, so every run matches
    score = random_walk_kernel(g, "a", "a", cfg)
    draws = walk_draws(0, 0, 0, 300)
    runs = int((draws[:, 4] < 0.5).sum()) + (0 if draws[-1, 4] < 0.5 else 1)
    assert score == runs


def test_walk_errors():
    g = make_graph({"a": "A", "b": "A", "c": "A"}, [("e", "X", ["a", "b"]), ("s", "X", ["c"])])
    with pytest.raises(DataError, match="'c'"):
        random_walk_kernel(g, "a", "c")
    with pytest.raises(DataError):
        WalkConfig(restart_prob=0)
    with pytest.raises(DataError):
        WalkConfig(mode="other")


def test_spectrum_examples():
    assert spectrum_features("ACDAC", 2) == {"AC": 2, "CD": 1, "DA": 1}
    m = spectrum_gram([SequenceRecord("p", "AAAA"), SequenceRecord("q", "AAAC")], 3, normalize=False)
    assert m.values.tolist() == [[4.0, 2.0], [2.0, 2.0]]
    n = spectrum_gram([SequenceRecord("p", "AAAA"), SequenceRecord("q", "AAAC")], 3)
    assert n.values[0, 1] == pytest.approx(2 / np.sqrt(8), abs=1e-15)
    with pytest.raises(DataError):
        spectrum_features("AC", 3)
    with pytest.raises(DataError):
        SequenceRecord("z", "")


def _random_seqs(rng, n, length=25):
    return {f"s{i}": "".join(rng.choice(list("ACDEFG"), size=int(rng.integers(5, length)))) for i in range(n)}


@pytest.mark.parametrize("normalize", [False, True])
def test_pairwise_matches_loops(normalize):
    rng = np.random.default_rng(2)
    seqs = _random_seqs(rng, 8)
    ids = list(seqs)
    pairs = [(f"p{k}", *rng.choice(ids, size=2, replace=False)) for k in range(12)]
    pairs.append(("self", ids[0], ids[0]))
    got = pairwise_spectrum_kernel(pairs, {i: SequenceRecord(i, s) for i, s in seqs.items()}, 3, normalize)
    want = oracles.pair_kernel_loops(pairs, seqs, 3, normalize)
    assert np.max(np.abs(got.values - want)) <= 1e-12
    eig = np.linalg.eigvalsh(got.values)
    assert eig[0] >= -1e-8 * eig[-1]


def test_pairwise_is_order_symmetric():
    rng = np.random.default_rng(3)
    seqs = [SequenceRecord(i, s) for i, s in _random_seqs(rng, 4).items()]
    a = pairwise_spectrum_kernel([("x", "s0", "s1"), ("y", "s2", "s3")], seqs)
    b = pairwise_spectrum_kernel([("x", "s1", "s0"), ("y", "s3", "s2")], seqs)
    assert np.allclose(a.values, b.values, atol=1e-15)


def test_pairwise_missing_sequence():
    with pytest.raises(DataError, match="'s9'"):
        pairwise_spectrum_kernel([("x", "s0", "s9")], [SequenceRecord("s0", "ACDC")])


def test_read_fasta(tmp_path):
    p = tmp_path / "s.fa"
    p.write_text(">a desc\nACD\nEF\n\n>b\nGG\n")
    recs = read_fasta(p)
    assert [(r.id, r.residues) for r in recs] == [("a", "ACDEF"), ("b", "GG")]
    p.write_text("ACD\n>a\nAC\n")
    with pytest.raises(FormatError):
        read_fasta(p)
    p.write_text(">a\nAC\n>a\nAC\n")
    with pytest.raises(FormatError):
        read_fasta(p)
    p.write_text(">a\n>b\nAC\n")
    with pytest.raises(FormatError):
        read_fasta(p)
