"""Baseline kernels: paired random walks on hypergraphs and k-mer spectrum kernels."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import DataError, FormatError
from .hypermodel import Hypergraph
from .kernels import KernelMatrix, cosine_normalize

__all__ = [
    "WalkConfig",
    "SequenceRecord",
    "walk_draws",
    "random_walk_kernel",
    "random_walk_gram",
    "spectrum_features",
    "spectrum_gram",
    "pairwise_spectrum_kernel",
    "read_fasta",
]

EXACT = "exact"
CUMULATIVE = "cumulative"


@dataclass(frozen=True)
class WalkConfig:
    total_steps: int = 10_000
    restart_prob: float = 0.1
    seed: int = 0
    mode: str = EXACT
    allow_stay: bool = False  # destination may be the current vertex
    avoid_arrival: bool = False  # skip the arriving hyperedge when another exists

    def __post_init__(self):
        if self.total_steps <= 0:
            raise DataError("total_steps must be positive")
        if not 0 < self.restart_prob < 1:
            raise DataError("restart probability must lie strictly between 0 and 1")
        if self.mode not in (EXACT, CUMULATIVE):
            raise DataError(f"walk mode must be {EXACT!r} or {CUMULATIVE!r}")


def walk_draws(seed: int, a: int, b: int, steps: int) -> np.ndarray:
    """Uniforms for the walk pair keyed by vertex indices ``(a, b)``.

    Stream: PCG64 seeded by ``SeedSequence(seed, spawn_key=(a, b))``; one row
    of five uniforms per step (edge u, destination u, edge v, destination v,
    restart).
    """
    ss = np.random.SeedSequence(seed, spawn_key=(a, b))
    return np.random.Generator(np.random.PCG64(ss)).random((steps, _kernels.DRAW_WIDTH))


def _walk_arrays(g: Hypergraph):
    inc_ptr, inc_idx = g.incidence_csr(min_cardinality=2)
    mem_ptr, mem_idx = g.member_csr
    return inc_ptr, inc_idx, mem_ptr, mem_idx, g.vertex_label_codes, g.edge_label_codes


def _score(arrays, iu, iv, draws, cfg):
    return _kernels.paired_walk_score(*arrays, iu, iv, draws, cfg.restart_prob, cfg.mode == CUMULATIVE,
                                      cfg.allow_stay, cfg.avoid_arrival)


def random_walk_kernel(g: Hypergraph, u: str, v: str, cfg: WalkConfig = WalkConfig(),
                       symmetrize: bool = False) -> float:
    """Summed walk score between ``u`` and ``v`` after ``cfg.total_steps`` steps.

    With ``symmetrize`` the stream is keyed by the unordered pair and the
    runs from ``(u, v)`` and ``(v, u)`` are averaged, so the value is
    exactly symmetric.
    """
    arrays = _walk_arrays(g)
    iu, iv = g.vertex_index(u), g.vertex_index(v)
    inc_ptr = arrays[0]
    for name, i in ((u, iu), (v, iv)):
        if inc_ptr[i + 1] == inc_ptr[i]:
            raise DataError(f"vertex {name!r} has no hyperedge to walk along")
    if not symmetrize:
        return _score(arrays, iu, iv, walk_draws(cfg.seed, iu, iv, cfg.total_steps), cfg)
    a, b = min(iu, iv), max(iu, iv)
    draws = walk_draws(cfg.seed, a, b, cfg.total_steps)
    return 0.5 * (_score(arrays, a, b, draws, cfg) + _score(arrays, b, a, draws, cfg))


def random_walk_gram(g: Hypergraph, roots: Sequence[str], cfg: WalkConfig = WalkConfig(),
                     normalize: bool = True) -> KernelMatrix:
    """Symmetrized walk kernel over ``roots``; entries are schedule independent."""
    n = len(roots)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            values[i, j] = values[j, i] = random_walk_kernel(g, roots[i], roots[j], cfg, symmetrize=True)
    if normalize:
        values = cosine_normalize(values, roots)
    return KernelMatrix(roots, values, {"walk": cfg.__dict__})


# -- spectrum kernels ------------------------------------------------------------


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    residues: str

    def __post_init__(self):
        if not self.residues:
            raise DataError(f"sequence {self.id!r} is empty")


def read_fasta(path: str | Path) -> list[SequenceRecord]:
    """FASTA records; the id is the header up to the first whitespace."""
    records = []
    ident, chunks, start = None, [], 0
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            if ident is not None:
                records.append(_record(ident, chunks, start, path))
            head = line[1:].split()
            if not head:
                raise FormatError("empty FASTA header", lineno, str(path))
            ident, chunks, start = head[0], [], lineno
        elif ident is None:
            raise FormatError("sequence data before the first header", lineno, str(path))
        else:
            chunks.append(line)
    if ident is not None:
        records.append(_record(ident, chunks, start, path))
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate FASTA ids", None, str(path))
    return records


def _record(ident, chunks, lineno, path):
    seq = "".join(chunks)
    if not seq:
        raise FormatError(f"sequence {ident!r} is empty", lineno, str(path))
    return SequenceRecord(ident, seq)


def spectrum_features(s: SequenceRecord | str, k: int = 3) -> Counter:
    """Counts of all contiguous k-mers."""
    residues = s.residues if isinstance(s, SequenceRecord) else s
    if k < 1:
        raise DataError("k must be positive")
    if len(residues) < k:
        raise DataError(f"sequence shorter than k={k}")
    return Counter(residues[i : i + k] for i in range(len(residues) - k + 1))


def spectrum_gram(seqs: Sequence[SequenceRecord], k: int = 3, normalize: bool = True) -> KernelMatrix:
    ids = [s.id for s in seqs]
    feats = [spectrum_features(s, k) for s in seqs]
    vocab = {}
    rows, cols, data = [], [], []
    for r, f in enumerate(feats):
        for kmer, c in f.items():
            rows.append(r)
            cols.append(vocab.setdefault(kmer, len(vocab)))
            data.append(float(c))
    X = sp.csr_matrix((data, (rows, cols)), shape=(len(seqs), max(len(vocab), 1)))
    values = (X @ X.T).toarray()
    values = np.triu(values) + np.triu(values, 1).T
    if normalize:
        values = cosine_normalize(values, ids)
    return KernelMatrix(ids, values, {"spectrum_k": k})


def pairwise_spectrum_kernel(
    pairs: Sequence[tuple[str, str, str]],
    seqs: Sequence[SequenceRecord] | Mapping[str, SequenceRecord],
    k: int = 3,
    normalize: bool = True,
) -> KernelMatrix:
    """Symmetrized pair kernel ``K(a,c)K(b,d) + K(a,d)K(b,c)``.

    ``K`` is the cosine-normalized spectrum kernel; with ``normalize`` the
    pair matrix is cosine-normalized as well.
    """
    if isinstance(seqs, Mapping):
        by_id = dict(seqs)
    else:
        by_id = {s.id: s for s in seqs}
    used = []
    for pid, a, b in pairs:
        for x in (a, b):
            if x not in by_id:
                raise DataError(f"pair {pid!r}: no sequence for vertex {x!r}")
            if x not in used:
                used.append(x)
    base = spectrum_gram([by_id[x] for x in used], k, normalize=True).values
    pos = {x: i for i, x in enumerate(used)}
    A = np.array([pos[a] for _, a, _ in pairs], dtype=np.int64)
    B = np.array([pos[b] for _, _, b in pairs], dtype=np.int64)
    values = base[np.ix_(A, A)] * base[np.ix_(B, B)] + base[np.ix_(A, B)] * base[np.ix_(B, A)]
    ids = [p for p, _, _ in pairs]
    if normalize:
        values = cosine_normalize(values, ids)
    return KernelMatrix(ids, values, {"pairwise_spectrum_k": k})
