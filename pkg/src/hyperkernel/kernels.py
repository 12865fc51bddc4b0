"""Hypergraphlet kernels and Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataError, NumericalError
from .hypergraphlets import (
    ALL_OPS,
    MAX_ORDER,
    FeatureVector,
    apply_edit_smoothing,
    count_all,
    parse_ops,
)
from .hypermodel import Hypergraph

__all__ = [
    "KernelSpec",
    "KernelMatrix",
    "kernel_value",
    "gram_matrix",
    "combine_kernels",
    "smooth_features",
    "hypergraphlet_gram",
    "check_psd",
    "read_kernel_tsv",
]

PSD_TOL = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Kernel parameters: max order, edit budget, edit operations, cosine flag."""

    N: int = MAX_ORDER
    tau: int = 0
    ops: frozenset[str] = ALL_OPS
    normalize: bool = True

    def __post_init__(self):
        if not 1 <= self.N <= MAX_ORDER:
            raise DataError(f"N must be in 1..{MAX_ORDER}, got {self.N}")
        if self.tau < 0:
            raise DataError("tau must be nonnegative")
        object.__setattr__(self, "ops", parse_ops(self.ops))

    @property
    def name(self) -> str:
        if self.tau == 0:
            return f"k(N={self.N})"
        tag = {frozenset({"vertex-label-sub"}): "vl", frozenset({"hyperedge-label-sub"}): "hl",
               frozenset({"hyperedge-indel"}): "hi"}.get(self.ops, "all" if self.ops == ALL_OPS else "+".join(sorted(self.ops)))
        return f"k_{tag}(N={self.N},tau={self.tau})"

    def as_dict(self) -> dict:
        return {"N": self.N, "tau": self.tau, "ops": sorted(self.ops), "normalize": self.normalize}


@dataclass
class KernelMatrix:
    ids: tuple[str, ...]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ids = tuple(self.ids)
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise DataError(f"kernel matrix shape {self.values.shape} does not match {n} ids")
        if len(set(self.ids)) != n:
            raise DataError("duplicate example ids in kernel matrix")

    def __len__(self):
        return len(self.ids)

    def index(self, ids: Sequence[str]) -> np.ndarray:
        pos = {x: i for i, x in enumerate(self.ids)}
        try:
            return np.array([pos[x] for x in ids], dtype=np.int64)
        except KeyError as exc:
            raise DataError(f"unknown example id {exc.args[0]!r}") from None

    def subset(self, ids: Sequence[str]) -> "KernelMatrix":
        idx = self.index(ids)
        return KernelMatrix(tuple(ids), self.values[np.ix_(idx, idx)], dict(self.meta))

    def normalized(self) -> "KernelMatrix":
        return KernelMatrix(self.ids, cosine_normalize(self.values, self.ids), dict(self.meta))

    def to_tsv(self) -> str:
        lines = ["\t" + "\t".join(self.ids)]
        for i, row in zip(self.ids, self.values):
            lines.append(i + "\t" + "\t".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"

    def to_svmlight(self, labels: Mapping[str, int] | None = None) -> str:
        """Precomputed-kernel lines ``<label> 0:<row> 1:<K(x,x1)> ...`` (rows 1-based)."""
        lines = []
        for r, (i, row) in enumerate(zip(self.ids, self.values), start=1):
            lab = labels.get(i, 0) if labels is not None else 0
            body = " ".join(f"{c}:{x:.17g}" for c, x in enumerate(row, start=1))
            lines.append(f"{lab:+d} 0:{r} {body}" if lab else f"0 0:{r} {body}")
        return "\n".join(lines) + "\n"


def read_kernel_tsv(path: str | Path) -> KernelMatrix:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    ids = text[0].split("\t")[1:]
    rows, row_ids = [], []
    for line in text[1:]:
        if not line.strip():
            continue
        tok = line.split("\t")
        row_ids.append(tok[0])
        rows.append([float(x) for x in tok[1:]])
    if row_ids != ids:
        raise DataError(f"{path}: row ids do not match column ids")
    return KernelMatrix(ids, np.array(rows))


def _dot(fu: FeatureVector, fv: FeatureVector, N: int) -> float:
    if len(fu.counts) > len(fv.counts):
        fu, fv = fv, fu
    other = fv.counts
    return float(sum(float(v) * float(other[c]) for c, v in fu.counts.items() if c[0] <= N and c in other))


def _check_compatible(a: FeatureVector, b: FeatureVector) -> None:
    if a.sigma != b.sigma or a.xi != b.xi:
        raise DataError("feature vectors were counted over different alphabets")


def kernel_value(fu: FeatureVector, fv: FeatureVector, spec: KernelSpec = KernelSpec(), names=("u", "v")) -> float:
    """Sum over orders 1..N of the per-order inner products, optionally cosine normalized."""
    _check_compatible(fu, fv)
    k = _dot(fu, fv, spec.N)
    if not spec.normalize:
        return k
    kuu, kvv = _dot(fu, fu, spec.N), _dot(fv, fv, spec.N)
    for name, val in zip(names, (kuu, kvv)):
        if val <= 0:
            raise NumericalError(f"cannot normalize: example {name!r} has a zero feature vector")
    return k / np.sqrt(kuu * kvv)


def _design_matrix(features: Sequence[FeatureVector], N: int) -> sp.csr_matrix:
    columns: dict[bytes, int] = {}
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for fv in features:
        for c, v in fv.counts.items():
            if c[0] > N:
                continue
            indices.append(columns.setdefault(c, len(columns)))
            data.append(float(v))
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(features), max(len(columns), 1)),
    )


def cosine_normalize(values: np.ndarray, ids: Sequence[str] | None = None) -> np.ndarray:
    d = np.diag(values).copy()
    bad = np.flatnonzero(d <= 0)
    if len(bad):
        who = ids[bad[0]] if ids is not None else int(bad[0])
        raise NumericalError(f"cannot normalize: example {who!r} has zero self-similarity")
    s = np.sqrt(d)
    out = values / np.outer(s, s)
    np.fill_diagonal(out, 1.0)
    return out


def _symmetrize_upper(values: np.ndarray) -> np.ndarray:
    upper = np.triu(values)
    return upper + np.triu(upper, 1).T


def gram_matrix(features: Sequence[tuple[str, FeatureVector]] | Mapping[str, FeatureVector],
                spec: KernelSpec = KernelSpec()) -> KernelMatrix:
    """Gram matrix of (already smoothed) feature vectors.

    The upper triangle of the sparse product is mirrored so the result is
    exactly symmetric.
    """
    items = list(features.items()) if isinstance(features, Mapping) else list(features)
    ids = [i for i, _ in items]
    if len(set(ids)) != len(ids):
        raise DataError("duplicate example ids")
    fvs = [f for _, f in items]
    for f in fvs[1:]:
        _check_compatible(fvs[0], f)
    X = _design_matrix(fvs, spec.N)
    values = _symmetrize_upper((X @ X.T).toarray())
    if spec.normalize:
        values = cosine_normalize(values, ids)
    return KernelMatrix(ids, values, {"spec": spec.as_dict()})


def combine_kernels(ms: Sequence[KernelMatrix], weights: Sequence[float] | None = None) -> KernelMatrix:
    """Entrywise weighted sum (equal weights by default)."""
    if not ms:
        raise DataError("nothing to combine")
    if weights is None:
        weights = [1.0 / len(ms)] * len(ms)
    if len(weights) != len(ms):
        raise DataError("one weight per matrix required")
    if any(w < 0 for w in weights):
        raise DataError("kernel weights must be nonnegative")
    ids = ms[0].ids
    for m in ms[1:]:
        if m.ids != ids:
            raise DataError("kernel matrices are over different example ids")
    values = sum(w * m.values for w, m in zip(weights, ms))
    return KernelMatrix(ids, values, {"combined": [m.meta for m in ms], "weights": list(weights)})


def check_psd(m: KernelMatrix | np.ndarray, tol: float = PSD_TOL) -> float:
    """Return the minimum eigenvalue; raise if it is below ``-tol * max eigenvalue``."""
    values = m.values if isinstance(m, KernelMatrix) else np.asarray(m)
    if not np.array_equal(values, values.T):
        raise NumericalError("kernel matrix is not symmetric")
    eig = np.linalg.eigvalsh(values)
    lo, hi = float(eig[0]), float(eig[-1])
    if lo < -tol * max(hi, 0.0):
        raise NumericalError(f"kernel matrix is not PSD (min eigenvalue {lo:.3g}, max {hi:.3g})")
    return lo


def smooth_features(features: Mapping[str, FeatureVector], spec: KernelSpec) -> dict[str, FeatureVector]:
    out = {}
    for k, f in features.items():
        f = f.restricted(spec.N)
        out[k] = apply_edit_smoothing(f, spec.tau, spec.ops) if spec.tau else f
    return out


def hypergraphlet_gram(g: Hypergraph, roots: Sequence[str] | None = None, spec: KernelSpec = KernelSpec(),
                       threads: int = 1) -> KernelMatrix:
    """Count, smooth and assemble in one call."""
    feats = count_all(g, roots, spec.N, threads=threads)
    return gram_matrix(smooth_features(feats, spec), spec)
