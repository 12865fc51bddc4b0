"""Counting labeled hypergraphlets with Pólya's theorem.

The automorphism group of a base hypergraphlet acts on its vertices and
hyperedges; substituting the alphabet sizes into its cycle index gives the
number of non-isomorphic labelings.  Base structures with identical counts
for every alphabet size form an equivalence class.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .hypergraphlets import MAX_ORDER, RootedHypergraphlet, enumerate_base, _PERMS
from .errors import DataError

__all__ = [
    "AutomorphismGroup",
    "CycleIndex",
    "EquivalenceClass",
    "EquivalenceClassTable",
    "automorphism_group",
    "cycle_index",
    "count_labeled",
    "partition_classes",
    "kappa",
    "report",
]

PROBE_SIZES = (1, 2, 3)


@dataclass(frozen=True)
class AutomorphismGroup:
    """Root-fixing automorphisms as ``(vertex perm, induced edge perm)``.

    ``vertex perm[i]`` is the image of vertex ``i``; ``edge perm[k]`` is the
    position (in ``h.hyperedges``) of the image of hyperedge ``k``.
    """

    order: int
    n_edges: int
    permutations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __len__(self):
        return len(self.permutations)


def automorphism_group(h: RootedHypergraphlet) -> AutomorphismGroup:
    """Brute force over the (at most 3!) root-fixing vertex permutations."""
    pos = {m: k for k, (m, _) in enumerate(h.hyperedges)}
    perms = []
    for p, maskmap in _PERMS[h.order]:
        image = [maskmap[m] for m, _ in h.hyperedges]
        if all(m in pos for m in image):
            perms.append((p, tuple(pos[m] for m in image)))
    return AutomorphismGroup(h.order, len(h.hyperedges), tuple(perms))


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    """``j_k`` = number of cycles of length ``k`` (k = 1..len(perm))."""
    seen = [False] * len(perm)
    counts = [0] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        counts[length - 1] += 1
    return tuple(counts)


@dataclass(frozen=True)
class CycleIndex:
    """One term per group element: ``(1/|A|, vertex cycle type, edge cycle type)``."""

    terms: tuple[tuple[Fraction, tuple[int, ...], tuple[int, ...]], ...]

    def collected(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
        """Like monomials merged."""
        out: dict = defaultdict(Fraction)
        for coef, vt, et in self.terms:
            out[(vt, et)] += coef
        return dict(out)

    def evaluate(self, sigma_size: int, xi_size: int) -> Fraction:
        return sum(
            (coef * Fraction(sigma_size) ** sum(vt) * Fraction(xi_size) ** sum(et) for coef, vt, et in self.terms),
            Fraction(0),
        )

    def substituted(self, fully_labeled: bool = True) -> dict[tuple[int, int], Fraction]:
        """Polynomial in (|Sigma|, |Xi|) as ``{(deg_sigma, deg_xi): coefficient}``."""
        out: dict = defaultdict(Fraction)
        for coef, vt, et in self.terms:
            out[(sum(vt), sum(et) if fully_labeled else 0)] += coef
        return dict(out)

    def __str__(self):
        parts = []
        for (vt, et), coef in sorted(self.collected().items(), reverse=True):
            mono = [_var("s", k, j) for k, j in enumerate(vt, 1) if j]
            mono += [_var("s'", k, j) for k, j in enumerate(et, 1) if j]
            term = " ".join(mono) or "1"
            parts.append(term if coef == 1 else f"{coef} {term}")
        return " + ".join(parts)


def _var(name, k, j):
    return f"{name}{k}" + (f"^{j}" if j > 1 else "")


def cycle_index(a: AutomorphismGroup) -> CycleIndex:
    w = Fraction(1, len(a))
    return CycleIndex(tuple((w, _cycle_type(vp), _cycle_type(ep)) for vp, ep in a.permutations))


def count_labeled(h: RootedHypergraphlet, sigma_size: int, xi_size: int) -> int:
    """Number of non-isomorphic labelings of base structure ``h``."""
    if sigma_size < 1 or xi_size < 1:
        raise DataError("alphabet sizes must be positive")
    value = cycle_index(automorphism_group(h)).evaluate(sigma_size, xi_size)
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral labeled count {value}")
    return int(value)


def format_polynomial(poly: dict[tuple[int, int], Fraction]) -> str:
    """E.g. ``1/2 (S^3 X^4 + S^2 X^3)`` with S = |Sigma| and X = |Xi|."""
    denom = 1
    for c in poly.values():
        denom = denom * c.denominator // _gcd(denom, c.denominator)
    terms = []
    for (a, b), c in sorted(poly.items(), reverse=True):
        k = int(c * denom)
        mono = " ".join(x for x in (_pow("S", a), _pow("X", b)) if x) or "1"
        terms.append(mono if k == 1 else f"{k} {mono}")
    body = " + ".join(terms)
    if denom == 1:
        return body
    return f"1/{denom} ({body})"


def _pow(name, k):
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class EquivalenceClass:
    members: tuple[int, ...]  # indices into enumerate_base(n)
    polynomial: dict[tuple[int, int], Fraction]

    @property
    def representative(self) -> int:
        return self.members[0]

    @property
    def size(self) -> int:
        return len(self.members)

    def count(self, sigma_size: int, xi_size: int = 1) -> int:
        v = sum(
            (c * Fraction(sigma_size) ** a * Fraction(xi_size) ** b for (a, b), c in self.polynomial.items()),
            Fraction(0),
        )
        return int(v)

    @property
    def formula(self) -> str:
        return format_polynomial(self.polynomial)


@dataclass(frozen=True)
class EquivalenceClassTable:
    n: int
    fully_labeled: bool
    classes: tuple[EquivalenceClass, ...]

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def kappa(self, sigma_size: int, xi_size: int = 1) -> int:
        return sum(c.count(sigma_size, xi_size) * c.size for c in self.classes)


@lru_cache(maxsize=None)
def _indices(n: int):
    return tuple(cycle_index(automorphism_group(h)) for h in enumerate_base(n))


@lru_cache(maxsize=None)
def partition_classes(n: int, fully_labeled: bool = True) -> EquivalenceClassTable:
    """Group base hypergraphlets of order ``n`` by their labeled counts.

    Structures are first bucketed by exact counts on a grid of alphabet
    sizes; each bucket is then split by symbolic equality of the
    substituted cycle index, so the grid can never merge distinct classes.
    Without ``fully_labeled`` the hyperedge alphabet is fixed to one symbol.
    """
    if not 1 <= n <= MAX_ORDER:
        raise DataError(f"order must be in 1..{MAX_ORDER}")
    indices = _indices(n)
    xi_probe = PROBE_SIZES if fully_labeled else (1,)
    buckets: dict[tuple, list[int]] = defaultdict(list)
    for i, z in enumerate(indices):
        key = tuple(int(z.evaluate(s, x)) for s in PROBE_SIZES for x in xi_probe)
        buckets[key].append(i)
    classes = []
    for members in buckets.values():
        split: dict[tuple, list[int]] = defaultdict(list)
        for i in members:
            poly = indices[i].substituted(fully_labeled)
            split[tuple(sorted(poly.items()))].append(i)
        for poly_key, ms in split.items():
            classes.append(EquivalenceClass(tuple(ms), dict(poly_key)))
    classes.sort(key=_class_order)
    return EquivalenceClassTable(n, fully_labeled, tuple(classes))


def _class_order(c: EquivalenceClass):
    # asymmetric classes first, then by descending polynomial
    lead = max(c.polynomial)
    group_size = 1 / c.polynomial[lead]
    terms = [(-a, -b) for a, b in sorted(c.polynomial, reverse=True)]
    return (group_size, terms, c.members)


def kappa(n: int, sigma_size: int, xi_size: int) -> int:
    """Total number of distinct labeled hypergraphlets of order ``n``."""
    if sigma_size < 1 or xi_size < 1:
        raise DataError("alphabet sizes must be positive")
    return partition_classes(n, fully_labeled=True).kappa(sigma_size, xi_size)


def report(orders, sigma_size: int, xi_size: int, tsv: bool = False) -> str:
    """Class table per order: sizes, formulas, evaluated counts and kappa."""
    rows = []
    for n in orders:
        for fully in (False, True):
            table = partition_classes(n, fully)
            xs = xi_size if fully else 1
            for k, c in enumerate(table.classes, 1):
                rows.append((n, "full" if fully else "vertex", f"S{k}({n})", c.size, c.formula, c.count(sigma_size, xs)))
    kap = {n: kappa(n, sigma_size, xi_size) for n in orders}
    if tsv:
        lines = ["n\tlabeling\tclass\tsize\tformula\tm_i\tkappa"]
        for n, lab, name, size, formula, m in rows:
            lines.append(f"{n}\t{lab}\t{name}\t{size}\t{formula}\t{m}\t{kap[n] if lab == 'full' else ''}")
        return "\n".join(lines) + "\n"
    lines = [f"|Sigma| = {sigma_size}, |Xi| = {xi_size}   (S = |Sigma|, X = |Xi|)"]
    for n in orders:
        for lab in ("vertex", "full"):
            sel = [r for r in rows if r[0] == n and r[1] == lab]
            sizes = ",".join(str(r[3]) for r in sel)
            lines.append(f"n={n} {lab}-labeled: {len(sel)} classes, sizes {sizes}")
            for _, _, name, size, formula, m in sel:
                lines.append(f"  {name:<7} |S|={size:<4} m = {formula:<40} = {m}")
        lines.append(f"  kappa({n}, {sigma_size}, {xi_size}) = {kap[n]}")
    return "\n".join(lines) + "\n"
