"""Lattice, the Kontsevich-Soibelman Lie algebra on cone monomials, and
wall-crossing actions.

A ``GradedSeries`` is a finite sum of basis vectors ``x_m`` with rational
coefficients, cut off above a fixed degree. The bracket is
``{x_m, x_m'} = {m, m'} x_{m+m'}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd
from typing import Iterable, Mapping

from .linalg import solve

Vec = tuple[int, ...]


def primitive(m: Iterable[int]) -> Vec:
    m = tuple(int(x) for x in m)
    g = 0
    for x in m:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return tuple(x // g for x in m)


def is_primitive(m: Iterable[int]) -> bool:
    m = tuple(m)
    return any(m) and primitive(m) == m


def add(m: Vec, k: Vec) -> Vec:
    return tuple(a + b for a, b in zip(m, k))


def scale(c: int, m: Vec) -> Vec:
    return tuple(c * a for a in m)


@dataclass(frozen=True)
class Lattice:
    """``M = Z^rank`` with a skew form, a strictly convex cone and a degree."""

    rank: int
    skew: tuple[tuple[int, ...], ...]
    cone_generators: tuple[Vec, ...]
    order_functional: Vec

    def __post_init__(self):
        s = self.skew
        if len(s) != self.rank or any(len(r) != self.rank for r in s):
            raise ValueError("skew matrix has the wrong shape")
        for i in range(self.rank):
            for j in range(self.rank):
                if s[i][j] != -s[j][i]:
                    raise ValueError("skew matrix is not antisymmetric")
        if len(self.order_functional) != self.rank:
            raise ValueError("order functional has the wrong length")
        if len(self.cone_generators) != self.rank:
            raise ValueError("cone must be simplicial with rank generators")
        for g in self.cone_generators:
            if len(g) != self.rank:
                raise ValueError("cone generator has the wrong length")
            if self.degree(g) <= 0:
                raise ValueError(f"order functional is not positive on {g}")
        # simplicial with linearly independent generators => strictly convex
        from .linalg import det

        if det([list(g) for g in self.cone_generators]) == 0:
            raise ValueError("cone generators are linearly dependent")

    @classmethod
    def kronecker(cls, kappa: int) -> "Lattice":
        return cls(2, ((0, kappa), (-kappa, 0)), ((1, 0), (0, 1)), (1, 1))

    @property
    def kappa(self) -> int:
        return self.skew[0][1]

    def pair(self, m: Vec, mp: Vec) -> int:
        if len(m) != self.rank or len(mp) != self.rank:
            raise ValueError("dimension mismatch")
        return sum(m[i] * self.skew[i][j] * mp[j] for i in range(self.rank) for j in range(self.rank))

    def degree(self, m: Iterable[int]) -> int:
        return sum(a * b for a, b in zip(self.order_functional, m))

    def cone_coords(self, m: Vec) -> list[Fraction]:
        cols = [[g[i] for g in self.cone_generators] for i in range(self.rank)]
        return solve(cols, list(m))

    def in_cone(self, m: Vec) -> bool:
        return all(c >= 0 for c in self.cone_coords(m))

    def in_positive_part(self, m: Vec) -> bool:
        return any(m) and self.in_cone(m)

    def covector(self, m: Vec) -> Vec:
        """The functional ``{-, m}``, as coefficients of ``u``."""
        return tuple(sum(self.skew[i][j] * m[j] for j in range(self.rank)) for i in range(self.rank))

    def cone_points(self, N: int) -> list[Vec]:
        """Lattice points of ``M_sigma^+`` of degree at most ``N`` (rank 2)."""
        if self.rank != 2:
            raise NotImplementedError("enumeration implemented for rank 2")
        g1, g2 = self.cone_generators
        bound = N * 4 + 4
        out = []
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                m = (a, b)
                if any(m) and 0 < self.degree(m) <= N and self.in_cone(m):
                    out.append(m)
        return sorted(out)


def skew_pair(lattice: Lattice, m: Vec, mp: Vec) -> int:
    return lattice.pair(tuple(m), tuple(mp))


@dataclass(frozen=True)
class GradedSeries:
    terms: Mapping[Vec, Fraction] = field(default_factory=dict)
    order: int = 0

    def __post_init__(self):
        clean = {tuple(k): Fraction(v) for k, v in self.terms.items() if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, lattice: Lattice, terms: Mapping, N: int) -> "GradedSeries":
        out = {}
        for k, v in terms.items():
            k = tuple(k)
            if not lattice.in_positive_part(k):
                raise ValueError(f"{k} is not in the positive part of the cone")
            if lattice.degree(k) <= N and v != 0:
                out[k] = out.get(k, Fraction(0)) + Fraction(v)
        return cls(out, N)

    @classmethod
    def zero(cls, N: int) -> "GradedSeries":
        return cls({}, N)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coeff(self, m) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return GradedSeries(out, min(self.order, other.order))

    def __neg__(self):
        return GradedSeries({k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "GradedSeries":
        c = Fraction(c)
        return GradedSeries({k: c * v for k, v in self.terms.items()}, self.order)

    def truncate(self, lattice: Lattice, N: int) -> "GradedSeries":
        return GradedSeries({k: v for k, v in self.terms.items() if lattice.degree(k) <= N}, N)

    def homogeneous(self, lattice: Lattice, k: int) -> "GradedSeries":
        return GradedSeries({m: v for m, v in self.terms.items() if lattice.degree(m) == k}, self.order)

    def min_degree(self, lattice: Lattice) -> int | None:
        if not self.terms:
            return None
        return min(lattice.degree(m) for m in self.terms)

    def sorted_items(self):
        return sorted(self.terms.items())

    def __repr__(self):
        body = " + ".join(f"{v}*x{m}" for m, v in self.sorted_items()) or "0"
        return f"GradedSeries({body}; N={self.order})"


def lie_bracket(lattice: Lattice, a: GradedSeries, b: GradedSeries, N: int) -> GradedSeries:
    out: dict[Vec, Fraction] = {}
    for m, u in a.terms.items():
        dm = lattice.degree(m)
        for mp, v in b.terms.items():
            if dm + lattice.degree(mp) > N:
                continue
            p = lattice.pair(m, mp)
            if p:
                k = add(m, mp)
                out[k] = out.get(k, Fraction(0)) + p * u * v
    return GradedSeries(out, N)


def dilog_generator(lattice: Lattice, m: Vec, N: int) -> GradedSeries:
    """``sum_j (-1)^j x_{jm} / j^2`` up to degree ``N``."""
    m = tuple(m)
    if not is_primitive(m):
        raise ValueError(f"{m} is not primitive")
    if not lattice.in_cone(m):
        raise ValueError(f"{m} is not in the cone")
    out = {}
    j = 1
    while lattice.degree(scale(j, m)) <= N:
        out[scale(j, m)] = Fraction((-1) ** j, j * j)
        j += 1
    return GradedSeries(out, N)


@dataclass(frozen=True)
class WallCrossing:
    generator: GradedSeries
    covector: Vec

    def __post_init__(self):
        dirs = {primitive(m) for m in self.generator.terms}
        if len(dirs) > 1:
            raise ValueError("generator is not supported on a single ray")
        for d in dirs:
            if sum(a * b for a, b in zip(d, self.covector)) != 0:
                raise ValueError("covector does not annihilate the direction")

    def inverse(self) -> "WallCrossing":
        return WallCrossing(-self.generator, self.covector)


def derivation_multiplier(lattice: Lattice, log: GradedSeries, m0: Vec, N: int) -> GradedSeries:
    """Multiplier ``f`` with ``exp(D)(z^{m0}) = z^{m0} f`` where ``D(a) = {a, log}``.

    ``m0`` may be any lattice point; the multiplier lives in the cone algebra,
    with ``x_0`` standing for the constant term.
    """
    m0 = tuple(m0)
    zero = tuple(0 for _ in m0)
    total = {zero: Fraction(1)}
    cur = {zero: Fraction(1)}
    n = 0
    while cur:
        n += 1
        nxt: dict[Vec, Fraction] = {}
        for k, fk in cur.items():
            base = add(m0, k)
            dk = lattice.degree(k)
            for j, lj in log.terms.items():
                if dk + lattice.degree(j) > N:
                    continue
                p = lattice.pair(base, j)
                if p:
                    kj = add(k, j)
                    nxt[kj] = nxt.get(kj, Fraction(0)) + fk * lj * p
        cur = {k: v / n for k, v in nxt.items() if v}
        for k, v in cur.items():
            total[k] = total.get(k, Fraction(0)) + v
    return {k: v for k, v in total.items() if v}


def exp_action(lattice: Lattice, wall: WallCrossing, m0: Vec, N: int) -> dict[Vec, Fraction]:
    """Multiplier of ``z^{m0}`` under the wall-crossing automorphism."""
    return derivation_multiplier(lattice, wall.generator, m0, N)


def _bernoulli(n: int) -> Fraction:
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(Fraction(factorial(m + 1), factorial(k) * factorial(m + 1 - k)) * b[k] for k in range(m)) / (m + 1))
    return b[n]


def _compositions(n: int, parts: int):
    if parts == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def bch(lattice: Lattice, x: GradedSeries, y: GradedSeries, N: int) -> GradedSeries:
    """``log(exp X exp Y)`` truncated at degree ``N``.

    Uses the Goldberg/Varadarajan recursion for the homogeneous pieces
    ``Z_n`` in the word-length grading; every generator has degree at least
    one so words longer than ``N`` vanish.
    """
    br = lambda a, b: lie_bracket(lattice, a, b, N)  # noqa: E731
    s = (x + y).truncate(lattice, N)
    d = (x - y).truncate(lattice, N)
    z = [None, s]
    for n in range(1, N):
        nxt = br(d, z[n]).scaled(Fraction(1, 2))
        p = 1
        while 2 * p <= n:
            coef = _bernoulli(2 * p) / factorial(2 * p)
            if coef:
                acc = GradedSeries.zero(N)
                for ks in _compositions(n, 2 * p):
                    term = s
                    for kk in reversed(ks):
                        term = br(z[kk], term)
                        if not term:
                            break
                    acc = acc + term
                nxt = nxt + acc.scaled(coef)
            p += 1
        z.append(nxt.scaled(Fraction(1, n + 1)))
    total = GradedSeries.zero(N)
    for piece in z[1:]:
        total = total + piece
    return total


def bch_many(lattice: Lattice, logs: Iterable[GradedSeries], N: int) -> GradedSeries:
    total = GradedSeries.zero(N)
    for a in logs:
        total = bch(lattice, total, a, N)
    return total
