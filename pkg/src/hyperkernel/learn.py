"""Kernel SVM training, Platt calibration, AUC and cross-validation.

Also hosts the hierarchical clustering used to turn per-vertex vectors
(k-mer counts, annotation scores) into a small vertex alphabet.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.cluster.hierarchy import cut_tree, linkage
from scipy.stats import rankdata

from . import _kernels
from .errors import DataError, NumericalError
from .kernels import KernelMatrix, check_psd

__all__ = [
    "LabeledDataset",
    "TrainedModel",
    "CVResult",
    "svm_train",
    "decision_function",
    "predict",
    "platt_fit",
    "auc",
    "roc_points",
    "cross_validate",
    "nested_cross_validate",
    "assign_folds",
    "cluster_alphabet",
]

KKT_TOL = 1e-3


@dataclass(frozen=True)
class LabeledDataset:
    """Example ids with targets +1, -1 or 0 (unlabeled)."""

    ids: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if len(self.ids) != len(self.labels):
            raise DataError("ids and labels differ in length")
        if len(set(self.ids)) != len(self.ids):
            raise DataError("duplicate example ids")
        bad = [x for x in self.labels if x not in (-1, 0, 1)]
        if bad:
            raise DataError(f"labels must be +1, -1 or 0, got {bad[0]}")

    @classmethod
    def from_mapping(cls, labels: Mapping[str, int]) -> "LabeledDataset":
        return cls(tuple(labels), tuple(labels.values()))

    def targets(self, pu: bool = False) -> tuple[list[str], np.ndarray]:
        """Ids and +-1 targets used for training.

        Unlabeled examples are dropped, or treated as negatives when ``pu``.
        """
        ids, ys = [], []
        for i, t in zip(self.ids, self.labels):
            if t == 0:
                if not pu:
                    continue
                t = -1
            ids.append(i)
            ys.append(float(t))
        return ids, np.array(ys)

    def permuted(self, seed: int) -> "LabeledDataset":
        rng = np.random.default_rng(seed)
        return LabeledDataset(self.ids, tuple(np.array(self.labels)[rng.permutation(len(self.labels))].tolist()))


@dataclass
class TrainedModel:
    ids: tuple[str, ...]
    coef: np.ndarray  # alpha_i * y_i
    bias: float
    platt_a: float
    platt_b: float
    C: float
    alpha: np.ndarray
    y: np.ndarray
    iterations: int = 0
    objective: float = 0.0

    @property
    def support(self) -> list[str]:
        return [i for i, a in zip(self.ids, self.alpha) if a > 0]


def _bias(alpha, G, y, C):
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (alpha <= 0) & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (~at_upper & (alpha <= 0) & (y < 0))
        ub = yG[ub_mask].min() if ub_mask.any() else math.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -math.inf
        rho = 0.5 * (ub + lb)
    return -rho


def svm_train(
    m: KernelMatrix,
    d: LabeledDataset,
    C: float | None = None,
    tol: float = KKT_TOL,
    pu: bool = False,
    max_iter: int | None = None,
    check: bool = True,
) -> TrainedModel:
    """Soft-margin SVM on a precomputed kernel, followed by a Platt fit.

    ``C`` defaults to the reciprocal mean of the training diagonal.
    """
    ids, y = d.targets(pu)
    if (y > 0).sum() == 0 or (y < 0).sum() == 0:
        raise DataError("training set needs both classes")
    K = m.subset(ids).values
    if check:
        check_psd(K)
    if C is None:
        C = 1.0 / float(np.mean(np.diag(K)))
    if C <= 0:
        raise DataError("capacity C must be positive")
    if max_iter is None:
        max_iter = max(10_000_000, 100 * len(ids))
    alpha, G, it, ok = _kernels.smo_solve(np.ascontiguousarray(K), y, float(C), float(tol), int(max_iter))
    if not ok:
        raise NumericalError(f"SMO did not converge in {it} iterations")
    bias = _bias(alpha, G, y, C)
    coef = alpha * y
    decision = K @ coef + bias
    a, b = platt_fit(decision, y)
    objective = float(alpha.sum() - 0.5 * alpha @ (G + 1.0))
    return TrainedModel(tuple(ids), coef, bias, a, b, float(C), alpha, y, it, objective)


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """Maximization-form dual value ``sum(a) - 0.5 a'Qa``."""
    q = (y * alpha) @ K @ (y * alpha)
    return float(alpha.sum() - 0.5 * q)


def decision_function(model: TrainedModel, kernel_rows: np.ndarray) -> np.ndarray:
    kernel_rows = np.atleast_2d(np.asarray(kernel_rows, dtype=np.float64))
    if kernel_rows.shape[1] != len(model.ids):
        raise DataError(f"kernel rows have {kernel_rows.shape[1]} columns, model has {len(model.ids)} training ids")
    return kernel_rows @ model.coef + model.bias


def _sigmoid(f, a, b):
    z = a * f + b
    # numerically stable 1 / (1 + exp(z))
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, e / (1.0 + e), 1.0 / (1.0 + e))


def predict(model: TrainedModel, kernel_rows: np.ndarray) -> np.ndarray:
    """Platt-calibrated probabilities for rows of ``K(test, train)``."""
    return _sigmoid(decision_function(model, kernel_rows), model.platt_a, model.platt_b)


def platt_fit(f: np.ndarray, y: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Fit ``P(y=1|f) = 1 / (1 + exp(A f + B))`` by regularized Newton steps."""
    f = np.asarray(f, dtype=np.float64)
    n_pos = float((y > 0).sum())
    n_neg = float((y <= 0).sum())
    t = np.where(y > 0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def loss(A, B):
        z = f * A + B
        return float(np.sum(np.where(z >= 0, t * z, (t - 1.0) * z) + np.log1p(np.exp(-np.abs(z)))))

    A, B = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))
    fval = loss(A, B)
    for _ in range(max_iter):
        p = _sigmoid(f, A, B)
        q = 1.0 - p
        d2 = p * q
        h11 = float(np.sum(f * f * d2)) + 1e-12
        h22 = float(np.sum(d2)) + 1e-12
        h21 = float(np.sum(f * d2))
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            nA, nB = A + step * dA, B + step * dB
            nf = loss(nA, nB)
            if nf < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nf
                break
            step /= 2.0
        else:
            break
    return A, B


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve from ranks; tied scores count one half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = labels > 0
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both positive and negative examples")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_points(scores: Sequence[float], labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """``(fpr, tpr)`` at every distinct threshold, starting from (0, 0)."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(labels) > 0
    order = np.argsort(-scores, kind="mergesort")
    s, p = scores[order], pos[order]
    tp = np.cumsum(p)
    fp = np.cumsum(~p)
    last = np.r_[np.flatnonzero(np.diff(s)), len(s) - 1]
    tpr = np.r_[0.0, tp[last] / max(p.sum(), 1)]
    fpr = np.r_[0.0, fp[last] / max((~p).sum(), 1)]
    return fpr, tpr


@dataclass
class CVResult:
    mean_auc: float
    std_auc: float
    fold_aucs: list[float]
    fpr: np.ndarray
    tpr: np.ndarray
    folds: dict[str, int]
    scores: dict[str, float]
    seed: int
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "mean_auc": self.mean_auc,
            "std_auc": self.std_auc,
            "fold_aucs": self.fold_aucs,
            "n_folds": len(self.fold_aucs),
            "n_examples": len(self.folds),
            "seed": self.seed,
            **self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"

    def folds_tsv(self) -> str:
        return "fold\tauc\n" + "".join(f"{k}\t{a!r}\n" for k, a in enumerate(self.fold_aucs))

    def roc_tsv(self) -> str:
        return "fpr\ttpr\n" + "".join(f"{a!r}\t{b!r}\n" for a, b in zip(self.fpr, self.tpr))


def assign_folds(ids: Sequence[str], y: np.ndarray, folds: int, seed: int, stratify: bool = True) -> np.ndarray:
    """Fold index per example; fold sizes differ by at most one."""
    rng = np.random.default_rng(seed)
    n = len(ids)
    if stratify:
        pos = np.flatnonzero(y > 0)
        neg = np.flatnonzero(y <= 0)
        order = np.r_[pos[rng.permutation(len(pos))], neg[rng.permutation(len(neg))]]
    else:
        order = rng.permutation(n)
    fold = np.empty(n, dtype=np.int64)
    fold[order] = np.arange(n) % folds
    return fold


def cross_validate(
    m: KernelMatrix,
    d: LabeledDataset,
    folds: int = 10,
    seed: int = 0,
    stratify: bool = True,
    pu: bool = False,
    C: float | None = None,
    threads: int = 1,
) -> CVResult:
    """k-fold CV: train on k-1 folds, calibrate, score the held-out fold."""
    if folds < 2:
        raise DataError("need at least two folds")
    ids, y = d.targets(pu)
    if len(ids) < folds:
        raise DataError(f"{len(ids)} labeled examples cannot fill {folds} folds")
    fold = assign_folds(ids, y, folds, seed, stratify)
    K = m.subset(ids).values
    check_psd(K)
    idx_all = np.arange(len(ids))

    def run(k):
        test = idx_all[fold == k]
        train = idx_all[fold != k]
        yt, ytr = y[test], y[train]
        for name, part in (("test", yt), ("training", ytr)):
            if (part > 0).all() or (part < 0).all():
                raise DataError(f"fold {k}: {name} split has a single class; use fewer folds or stratify")
        tr_ids = [ids[i] for i in train]
        sub = KernelMatrix(tr_ids, K[np.ix_(train, train)])
        model = svm_train(sub, LabeledDataset(tr_ids, ytr.astype(int)), C=C, check=False)
        probs = predict(model, K[np.ix_(test, train)])
        return test, probs, auc(probs, yt)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(folds)))
    else:
        results = [run(k) for k in range(folds)]

    scores = np.empty(len(ids))
    fold_aucs = []
    for test, probs, a in results:
        scores[test] = probs
        fold_aucs.append(a)
    fpr, tpr = roc_points(scores, y)
    return CVResult(
        mean_auc=float(np.mean(fold_aucs)),
        std_auc=float(np.std(fold_aucs)),
        fold_aucs=fold_aucs,
        fpr=fpr,
        tpr=tpr,
        folds={i: int(f) for i, f in zip(ids, fold)},
        scores={i: float(s) for i, s in zip(ids, scores)},
        seed=seed,
        meta={"stratified": stratify, "positive_unlabeled": pu},
    )


def cluster_alphabet(vectors: Sequence[tuple[str, Mapping | Sequence[float]]] | Mapping, k: int) -> dict[str, str]:
    """Average-linkage clustering under cosine distance, cut into ``k`` groups.

    Labels ``L0``, ``L1``, ... go by decreasing cluster size, ties broken by
    the smallest member id.  Input order does not matter.
    """
    items = list(vectors.items()) if isinstance(vectors, Mapping) else list(vectors)
    if not items:
        raise DataError("no vectors to cluster")
    if not 1 <= k <= len(items):
        raise DataError(f"k must be in 1..{len(items)}")
    items.sort(key=lambda t: t[0])
    ids = [i for i, _ in items]
    if len(set(ids)) != len(ids):
        raise DataError("duplicate ids in clustering input")
    if isinstance(items[0][1], Mapping):
        keys = sorted({key for _, v in items for key in v})
        pos = {key: c for c, key in enumerate(keys)}
        X = np.zeros((len(items), len(keys)))
        for r, (_, v) in enumerate(items):
            for key, val in v.items():
                X[r, pos[key]] = val
    else:
        X = np.array([np.asarray(v, dtype=np.float64) for _, v in items])
    if X.ndim != 2 or X.shape[1] == 0:
        raise DataError("empty vectors")
    zero = np.flatnonzero(~np.any(X != 0, axis=1))
    if len(zero):
        raise DataError(f"vector for {ids[zero[0]]!r} is all zeros; cosine distance undefined")
    if len(items) == 1:
        return {ids[0]: "L0"}
    Z = linkage(X, method="average", metric="cosine")
    groups = cut_tree(Z, n_clusters=k).ravel()
    members: dict[int, list[str]] = {}
    for i, gidx in zip(ids, groups):
        members.setdefault(int(gidx), []).append(i)
    ranked = sorted(members.values(), key=lambda ms: (-len(ms), min(ms)))
    return {i: f"L{r}" for r, ms in enumerate(ranked) for i in ms}


def nested_cross_validate(
    matrices: Mapping[str, KernelMatrix],
    d: LabeledDataset,
    folds: int = 10,
    inner_folds: int = 5,
    seed: int = 0,
    stratify: bool = True,
    pu: bool = False,
) -> tuple[CVResult, list[str]]:
    """Outer CV where each fold picks its kernel by inner CV on the training part.

    Returns the outer result and the key chosen in every fold.
    """
    if not matrices:
        raise DataError("no candidate kernels")
    keys = list(matrices)
    ids, y = d.targets(pu)
    fold = assign_folds(ids, y, folds, seed, stratify)
    scores = np.empty(len(ids))
    fold_aucs, chosen = [], []
    for k in range(folds):
        train = [ids[i] for i in np.flatnonzero(fold != k)]
        test = [ids[i] for i in np.flatnonzero(fold == k)]
        ytr = y[fold != k]
        yte = y[fold == k]
        if (yte > 0).all() or (yte < 0).all():
            raise DataError(f"fold {k}: test split has a single class")
        inner = LabeledDataset(train, ytr.astype(int))
        best, best_auc = keys[0], -1.0
        for key in keys:
            a = cross_validate(matrices[key].subset(train), inner, inner_folds, seed + 1 + k, stratify).mean_auc
            if a > best_auc:
                best, best_auc = key, a
        chosen.append(best)
        m = matrices[best]
        model = svm_train(m.subset(train), inner, check=False)
        K = m.values[np.ix_(m.index(test), m.index(train))]
        probs = predict(model, K)
        scores[fold == k] = probs
        fold_aucs.append(auc(probs, yte))
    fpr, tpr = roc_points(scores, y)
    res = CVResult(
        mean_auc=float(np.mean(fold_aucs)),
        std_auc=float(np.std(fold_aucs)),
        fold_aucs=fold_aucs,
        fpr=fpr,
        tpr=tpr,
        folds={i: int(f) for i, f in zip(ids, fold)},
        scores={i: float(s) for i, s in zip(ids, scores)},
        seed=seed,
        meta={"stratified": stratify, "positive_unlabeled": pu, "selection": "nested", "inner_folds": inner_folds},
    )
    return res, chosen
