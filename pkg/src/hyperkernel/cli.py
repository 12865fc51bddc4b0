"""Command-line entry point: ``hyperkernel <subcommand> ...``.

Every flag can also come from a ``--config`` file of ``key = value`` lines
(keys are flag names without the leading dashes); flags on the command line
win.  Outputs are staged next to their destination and moved into place
only when the whole command succeeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .baselines import CUMULATIVE, EXACT, WalkConfig, pairwise_spectrum_kernel, random_walk_gram, read_fasta, spectrum_features, spectrum_gram
from .duality import QUERY_LABEL, LinkQuery, dual_to_hgr, dualize, enumerate_candidates, extend_dual, link_examples
from .errors import DataError, NumericalError
from .hypergraphlets import MAX_ORDER, count_all, format_features, read_features
from .hypermodel import Hypergraph, read_hgr
from .kernels import KernelMatrix, KernelSpec, combine_kernels, gram_matrix, read_kernel_tsv, smooth_features
from .learn import LabeledDataset, cluster_alphabet, cross_validate, nested_cross_validate
from .polya import report
from .synthetic import planted_motif_benchmark

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4

GRID_TAU = (0, 1)
GRID_N = (3, 4)
GRID_SIGMA = (4, 8, 16)


class UsageError(Exception):
    pass


# -- output staging ----------------------------------------------------------------


class Outputs:
    """Collects output files and publishes them atomically at the end."""

    def __init__(self):
        self._staged: list[tuple[str, Path]] = []
        self._stdout: list[str] = []

    def add(self, dest: str | None, text: str) -> None:
        if dest is None or dest == "-":
            self._stdout.append(text)
            return
        path = Path(dest)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".part", dir=path.parent)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self._staged.append((tmp, path))

    def commit(self) -> None:
        for tmp, path in self._staged:
            os.replace(tmp, path)
        self._staged.clear()
        for text in self._stdout:
            sys.stdout.write(text)
        sys.stdout.flush()

    def discard(self) -> None:
        for tmp, _ in self._staged:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
        self._staged.clear()


# -- small readers -------------------------------------------------------------------


def _parse_label(tok: str, path, lineno) -> int:
    table = {"+1": 1, "1": 1, "+": 1, "-1": -1, "-": -1, "0": 0, "?": 0}
    if tok not in table:
        raise DataError(f"{path}:{lineno}: label must be +1, -1 or 0, got {tok!r}")
    return table[tok]


def read_labels(path: str) -> dict[str, int]:
    """``<id> <label>`` lines with labels +1, -1 or 0 (unlabeled)."""
    out: dict[str, int] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 2:
            raise DataError(f"{path}:{lineno}: expected '<id> <label>'")
        if tok[0] in out:
            raise DataError(f"{path}:{lineno}: duplicate id {tok[0]!r}")
        out[tok[0]] = _parse_label(tok[1], path, lineno)
    if not out:
        raise DataError(f"{path}: no labels")
    return out


def format_labels(labels: dict[str, int]) -> str:
    return "".join(f"{k}\t{v:+d}\n" if v else f"{k}\t0\n" for k, v in labels.items())


def read_vectors(path: str) -> dict[str, dict[str, float]]:
    """``<id> <key>:<value> ...`` lines."""
    out: dict[str, dict[str, float]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        vec = {}
        for item in tok[1:]:
            key, sep, val = item.rpartition(":")
            try:
                vec[key] = float(val)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad vector entry {item!r}") from None
            if not sep:
                raise DataError(f"{path}:{lineno}: bad vector entry {item!r}")
        if tok[0] in out:
            raise DataError(f"{path}:{lineno}: duplicate id {tok[0]!r}")
        out[tok[0]] = vec
    return out


def read_pairs(path: str) -> list[tuple[str, str, str]]:
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 3:
            raise DataError(f"{path}:{lineno}: expected '<pair-id> <vertex> <vertex>'")
        pairs.append((tok[0], tok[1], tok[2]))
    return pairs


def _ids_arg(value: str | None) -> list[str] | None:
    """Comma-separated ids, or ``@file`` with one id per line."""
    if value is None:
        return None
    if value.startswith("@"):
        text = Path(value[1:]).read_text(encoding="utf-8")
        return [t for t in (line.split("#", 1)[0].strip() for line in text.splitlines()) if t]
    return [t for t in value.split(",") if t]


def _vectors_for(args) -> dict[str, dict[str, float]] | None:
    if getattr(args, "vectors", None):
        return read_vectors(args.vectors)
    if getattr(args, "fasta", None):
        return {r.id: dict(spectrum_features(r, args.kmer)) for r in read_fasta(args.fasta)}
    return None


def _fmt_matrix(m: KernelMatrix, fmt: str, labels: dict[str, int] | None = None) -> str:
    if fmt == "svmlight":
        return m.to_svmlight(labels)
    return m.to_tsv()


# -- subcommands --------------------------------------------------------------------


def cmd_dual(args, out: Outputs) -> None:
    g = read_hgr(args.input)
    if args.extend:
        members = _ids_arg(args.extend)
        d = extend_dual(g, LinkQuery(members), query_label=args.query_label, drop_isolated=args.drop_isolated)
        print(f"query vertex {d.query_vertex}; modified hyperedges: {' '.join(d.modified_edges)}", file=sys.stderr)
    else:
        d = dualize(g, drop_isolated=args.drop_isolated)
    if d.dummy_vertices:
        print(f"{len(d.dummy_vertices)} dummy vertices added", file=sys.stderr)
    out.add(args.output, dual_to_hgr(d))


def cmd_count(args, out: Outputs) -> None:
    g = read_hgr(args.input)
    roots = _ids_arg(args.roots)
    feats = count_all(g, roots, args.N, threads=args.threads)
    text, side = format_features(feats, inline_header=args.output in (None, "-"))
    conflicts = sum(f.conflicts for f in feats.values())
    if conflicts:
        print(f"warning: {conflicts} duplicate member sets collapsed", file=sys.stderr)
    out.add(args.output, text)
    if args.output not in (None, "-"):
        out.add(args.output + ".codes", side)


def _spec(args) -> KernelSpec:
    return KernelSpec(N=args.N, tau=args.tau, ops=args.ops, normalize=not args.no_normalize)


def cmd_kernel(args, out: Outputs) -> None:
    spec = _spec(args)
    if args.features:
        feats = read_features(args.features)
        roots = _ids_arg(args.roots)
        if roots is not None:
            missing = [r for r in roots if r not in feats]
            if missing:
                raise DataError(f"no feature vector for {missing[0]!r}")
            feats = {r: feats[r] for r in roots}
    elif args.input:
        g = read_hgr(args.input)
        feats = count_all(g, _ids_arg(args.roots), spec.N, threads=args.threads)
    else:
        raise UsageError("kernel needs an input hypergraph or --features")
    m = gram_matrix(smooth_features(feats, spec), spec)
    if args.combine:
        others = [read_kernel_tsv(p).subset(m.ids) for p in args.combine]
        weights = [float(w) for w in args.weights.split(",")] if args.weights else None
        m = combine_kernels([m, *others], weights)
    labels = read_labels(args.labels) if args.labels else None
    out.add(args.output, _fmt_matrix(m, args.format, labels))


def cmd_rw(args, out: Outputs) -> None:
    g = read_hgr(args.input)
    roots = _ids_arg(args.roots) or list(g.vertex_ids)
    cfg = WalkConfig(args.steps, args.restart, args.seed, args.mode, args.allow_stay, args.avoid_arrival)
    m = random_walk_gram(g, roots, cfg, normalize=not args.no_normalize)
    labels = read_labels(args.labels) if args.labels else None
    out.add(args.output, _fmt_matrix(m, args.format, labels))


def cmd_spectrum(args, out: Outputs) -> None:
    seqs = read_fasta(args.input)
    if args.pairs:
        m = pairwise_spectrum_kernel(read_pairs(args.pairs), seqs, args.k, normalize=not args.no_normalize)
    else:
        m = spectrum_gram(seqs, args.k, normalize=not args.no_normalize)
    labels = read_labels(args.labels) if args.labels else None
    out.add(args.output, _fmt_matrix(m, args.format, labels))


def cmd_polya(args, out: Outputs) -> None:
    for n in args.n:
        if not 1 <= n <= MAX_ORDER:
            raise DataError(f"order must be in 1..{MAX_ORDER}")
    out.add(args.output, report(args.n, args.sigma, args.xi, tsv=args.tsv))


def cmd_gen(args, out: Outputs) -> None:
    try:
        g, labels = planted_motif_benchmark(args.n_vertices, args.motifs, args.mean_degree, args.seed)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    out.add(args.output, g.to_hgr())
    if args.labels_out:
        out.add(args.labels_out, format_labels(labels))


def cmd_cluster(args, out: Outputs) -> None:
    vectors = _vectors_for(args)
    if vectors is None:
        raise UsageError("cluster-labels needs --vectors or --fasta")
    assign = cluster_alphabet(vectors, args.k)
    out.add(args.output, "".join(f"{i}\t{lab}\n" for i, lab in sorted(assign.items())))
    if args.hgr:
        g = read_hgr(args.hgr)
        missing = [v for v in g.vertex_ids if v not in assign]
        if missing:
            raise DataError(f"vertex {missing[0]!r} has no vector to cluster")
        relabeled = g.with_vertex_labels(assign, sigma=sorted(set(assign.values())))
        out.add(args.relabeled_out, relabeled.to_hgr())


# -- cross-validation pipeline -------------------------------------------------------


def _link_split(g: Hypergraph, labels: dict[str, int], args):
    positives = [i for i, t in labels.items() if t > 0]
    for e in positives:
        if not g.has_edge(e):
            raise DataError(f"link positive {e!r} is not a hyperedge id")
    queries = []
    for i, t in labels.items():
        if t <= 0:
            members = i.split("+")
            queries.append((i, LinkQuery(members)))
    if not queries:
        cands = enumerate_candidates(g, args.arity, sample=args.candidates, seed=args.seed)
        queries = [("+".join(sorted(q.members)), q) for q in cands]
        for i, _ in queries:
            labels[i] = -1
    existing = set(g.edge_members)
    for i, q in queries:
        if q.members in existing:
            raise DataError(f"candidate {i!r} is already a hyperedge")
    return positives, queries


def _features(g: Hypergraph, labels: dict[str, int], args, N: int):
    """Raw counts per example id for the requested task."""
    if args.task == "vertex":
        roots = [i for i in labels if labels[i] != 0 or args.pu]
        for r in roots:
            if not g.has_vertex(r):
                raise DataError(f"labeled id {r!r} is not a vertex")
        return count_all(g, roots, N, threads=args.threads)
    if args.task == "edge":
        d = dualize(g, drop_isolated=True)
        roots = [i for i in labels if labels[i] != 0 or args.pu]
        for r in roots:
            if not g.has_edge(r):
                raise DataError(f"labeled id {r!r} is not a hyperedge")
        return count_all(d.graph, roots, N, threads=args.threads)
    positives, queries = _link_split(g, labels, args)
    wanted = {i for i, _ in queries}
    cands = [q for _, q in queries]
    feats = {}
    for ex_id, d in link_examples(g, positives, cands, QUERY_LABEL):
        if ex_id not in wanted and ex_id not in positives:
            continue
        feats[ex_id] = count_all(d.graph, [d.query_vertex], N)[d.query_vertex]
    return feats


def _relabel(g: Hypergraph, vectors, k: int) -> Hypergraph:
    missing = [v for v in g.vertex_ids if v not in vectors]
    if missing:
        raise DataError(f"vertex {missing[0]!r} has no vector for alphabet construction")
    assign = cluster_alphabet({v: vectors[v] for v in g.vertex_ids}, k)
    return g.with_vertex_labels(assign, sigma=[f"L{i}" for i in range(k)])


def _check_grid(args, taus, Ns, sigmas) -> None:
    if args.unsafe_grid:
        return
    bad = [f"tau={t}" for t in taus if t not in GRID_TAU]
    bad += [f"N={n}" for n in Ns if n not in GRID_N]
    bad += [f"|Sigma|={s}" for s in sigmas if s is not None and s not in GRID_SIGMA]
    if bad:
        raise UsageError(f"grid value(s) {', '.join(bad)} outside the default ranges; pass --unsafe-grid")


def cmd_cv(args, out: Outputs) -> None:
    g = read_hgr(args.input)
    labels = read_labels(args.labels)
    vectors = _vectors_for(args)
    stratify = not args.no_stratify
    if args.grid:
        taus = tuple(args.grid_tau) if args.grid_tau else GRID_TAU
        Ns = tuple(args.grid_N) if args.grid_N else GRID_N
        sigmas = tuple(args.grid_sigma) if args.grid_sigma else (GRID_SIGMA if vectors is not None else (None,))
    else:
        taus, Ns = (args.tau,), (args.N,)
        sigmas = (args.sigma_size,) if args.sigma_size else (None,)
    _check_grid(args, taus, Ns, sigmas)
    if vectors is None and any(s is not None for s in sigmas):
        raise UsageError("alphabet sizes need --vectors or --fasta")

    cells = []
    matrices: dict[str, KernelMatrix] = {}
    dataset = None
    for s in sigmas:
        host = g if s is None else _relabel(g, vectors, s)
        feats = _features(host, dict(labels), args, max(Ns))
        if dataset is None:
            full = dict(labels)
            if args.task == "link":
                full.update({i: -1 for i in feats if i not in full})
            dataset = LabeledDataset([i for i in feats], [full[i] for i in feats])
        for N in Ns:
            for tau in taus:
                spec = KernelSpec(N=N, tau=tau, ops=args.ops, normalize=not args.no_normalize)
                m = gram_matrix(smooth_features(feats, spec), spec)
                key = f"N={N},tau={tau},sigma={s if s is not None else 'native'}"
                matrices[key] = m
                res = cross_validate(m, dataset, args.folds, args.seed, stratify, args.pu, threads=args.threads)
                cells.append({"key": key, "N": N, "tau": tau, "sigma_size": s, "spec": spec.as_dict(),
                              "mean_auc": res.mean_auc, "std_auc": res.std_auc, "fold_aucs": res.fold_aucs, "_res": res})

    best = max(cells, key=lambda c: c["mean_auc"])
    summary = {
        "task": args.task,
        "folds": args.folds,
        "seed": args.seed,
        "stratified": stratify,
        "positive_unlabeled": args.pu,
        "n_examples": len(dataset.ids),
        "n_positive": sum(1 for t in dataset.labels if t > 0),
    }
    if len(cells) == 1:
        res = best["_res"]
        summary.update({"spec": best["spec"], "sigma_size": best["sigma_size"], "mean_auc": res.mean_auc,
                        "std_auc": res.std_auc, "fold_aucs": res.fold_aucs})
    else:
        summary["grid"] = [{k: v for k, v in c.items() if k != "_res"} for c in cells]
        summary["best"] = {k: v for k, v in best.items() if k not in ("_res", "fold_aucs")}
        summary["selection"] = "max mean AUC over outer folds"
        res = best["_res"]
        if args.nested:
            nres, chosen = nested_cross_validate(matrices, dataset, args.folds, args.inner_folds,
                                                 args.seed, stratify, args.pu)
            summary["nested"] = {"mean_auc": nres.mean_auc, "std_auc": nres.std_auc,
                                 "fold_aucs": nres.fold_aucs, "chosen": chosen, "inner_folds": args.inner_folds}
    out.add(args.output, json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if args.folds_out:
        out.add(args.folds_out, res.folds_tsv())
    if args.roc_out:
        out.add(args.roc_out, res.roc_tsv())
    if args.scores_out:
        out.add(args.scores_out, "id\tlabel\tfold\tscore\n" + "".join(
            f"{i}\t{t}\t{res.folds[i]}\t{res.scores[i]!r}\n"
            for i, t in zip(*dataset.targets(args.pu)) if i in res.folds))


# -- argument parsing ---------------------------------------------------------------


def _add_spec_flags(p, N=MAX_ORDER, tau=0):
    p.add_argument("--N", type=int, default=N, help="maximum hypergraphlet order (1..4)")
    p.add_argument("--tau", type=int, default=tau, help="edit-distance budget")
    p.add_argument("--ops", default="all", help="edit operations: comma list of vl,hl,hi or 'all'")
    p.add_argument("--no-normalize", action="store_true", help="skip cosine normalization")


def _add_matrix_flags(p):
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--format", choices=("tsv", "svmlight"), default="tsv")
    p.add_argument("--labels", help="labels file used for svmlight targets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperkernel", description="Hypergraphlet kernels on labeled hypergraphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file supplying flag defaults")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("dual", parents=[common], help="dual or extended dual hypergraph")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--extend", help="candidate hyperedge members (comma list)")
    p.add_argument("--query-label", default=QUERY_LABEL)
    p.add_argument("--drop-isolated", action="store_true")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("count", parents=[common], help="hypergraphlet counts per vertex")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--N", type=int, default=MAX_ORDER)
    p.add_argument("--roots", help="comma list or @file of vertex ids")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("kernel", parents=[common], help="hypergraphlet Gram matrix")
    p.add_argument("input", nargs="?")
    p.add_argument("--features", help="precomputed feature file instead of a hypergraph")
    p.add_argument("--roots", help="comma list or @file of example ids")
    p.add_argument("--combine", nargs="+", help="TSV kernels to add to the result")
    p.add_argument("--weights", help="comma list of weights (hypergraphlet kernel first)")
    _add_spec_flags(p)
    _add_matrix_flags(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("rw-kernel", parents=[common], help="random-walk kernel baseline")
    p.add_argument("input")
    p.add_argument("--roots", help="comma list or @file of vertex ids")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--restart", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=(EXACT, CUMULATIVE), default=EXACT)
    p.add_argument("--allow-stay", action="store_true", help="destination may be the current vertex")
    p.add_argument("--avoid-arrival", action="store_true", help="do not leave along the arriving hyperedge")
    p.add_argument("--no-normalize", action="store_true")
    _add_matrix_flags(p)
    p.set_defaults(func=cmd_rw)

    p = sub.add_parser("spectrum", parents=[common], help="spectrum or pairwise spectrum kernel")
    p.add_argument("input", help="FASTA file")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--pairs", help="'<pair-id> <a> <b>' lines; omit for the plain spectrum kernel")
    p.add_argument("--no-normalize", action="store_true")
    _add_matrix_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("polya", parents=[common], help="equivalence classes and labeled counts")
    p.add_argument("--n", type=int, nargs="+", default=[3])
    p.add_argument("--sigma", type=int, default=1, help="|Sigma|")
    p.add_argument("--xi", type=int, default=1, help="|Xi|")
    p.add_argument("--tsv", action="store_true")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_polya)

    p = sub.add_parser("cv", parents=[common], help="cross-validated SVM evaluation")
    p.add_argument("input")
    p.add_argument("--labels", required=True)
    p.add_argument("--task", choices=("vertex", "edge", "link"), default="vertex")
    _add_spec_flags(p, tau=1)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--inner-folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--pu", action="store_true", help="treat unlabeled examples as negatives")
    p.add_argument("--grid", action="store_true", help="sweep tau, N and |Sigma|")
    p.add_argument("--nested", action="store_true", help="also report nested-CV selection for --grid")
    p.add_argument("--unsafe-grid", action="store_true", help="allow grid values outside the default ranges")
    p.add_argument("--grid-tau", type=int, nargs="+")
    p.add_argument("--grid-N", type=int, nargs="+")
    p.add_argument("--grid-sigma", type=int, nargs="+")
    p.add_argument("--sigma-size", type=int, help="cluster vertex labels into this many symbols")
    p.add_argument("--vectors", help="per-vertex vectors for alphabet construction")
    p.add_argument("--fasta", help="sequences for alphabet construction from k-mer counts")
    p.add_argument("--kmer", type=int, default=4)
    p.add_argument("--arity", type=int, default=2, help="candidate size for --task link")
    p.add_argument("--candidates", type=int, help="number of sampled link candidates")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--folds-out")
    p.add_argument("--roc-out")
    p.add_argument("--scores-out")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("gen-synthetic", parents=[common], help="planted-motif benchmark")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--labels-out")
    p.add_argument("--n-vertices", type=int, default=500)
    p.add_argument("--motifs", type=int, default=80)
    p.add_argument("--mean-degree", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cluster-labels", parents=[common], help="vertex alphabet by hierarchical clustering")
    p.add_argument("--vectors")
    p.add_argument("--fasta")
    p.add_argument("--kmer", type=int, default=4)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--hgr", help="hypergraph to relabel")
    p.add_argument("--relabeled-out", default="-")
    p.set_defaults(func=cmd_cluster)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip().strip('"')
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in read_config(args.config).items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"{args.config}: unknown setting {key!r} for {args.command}")
        if action.nargs == 0:
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            conv = action.type or str
            defaults[key] = [conv(v) for v in value.replace(",", " ").split()]
        else:
            defaults[key] = (action.type or str)(value)
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    out = Outputs()
    try:
        args = _apply_config(parser, argv)
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        args.func(args, out)
        out.commit()
        return EXIT_OK
    except SystemExit as exc:
        out.discard()
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        out.discard()
        print(f"hyperkernel: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        out.discard()
        print(f"hyperkernel: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, OSError, ValueError) as exc:
        out.discard()
        print(f"hyperkernel: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
