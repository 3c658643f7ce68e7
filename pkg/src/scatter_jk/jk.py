"""Exact Jeffrey-Kirwan residues for affine hyperplane arrangements.

Only the basis case is supported: at every singular point the hyperplanes
through it must form a basis, and the chamber is their positive span. There
the JK residue is the iterated residue in coordinates given by that basis,
corrected by the sign of the change of volume form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .affine import ONE, Affine
from .linalg import det, inverse, rank, solve


class NonTransverse(ValueError):
    pass


class UnsupportedChamber(ValueError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """``n = a^2 * b`` with ``b`` squarefree; returns ``(a, b)``."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    a, b = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        a *= p ** (e // 2)
        if e % 2:
            b *= p
        p += 1
    return a, b * n


@dataclass(frozen=True)
class SurdScalar:
    """``q * sqrt(d)`` with ``d`` squarefree."""

    q: Fraction
    d: int = 1

    def __post_init__(self):
        q = Fraction(self.q)
        d = int(self.d)
        if q == 0:
            d = 1
        else:
            a, d = _squarefree_split(d)
            q *= a
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)

    @classmethod
    def sqrt(cls, x) -> "SurdScalar":
        """Exact square root of a nonnegative rational."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of a negative number")
        if x == 0:
            return cls(Fraction(0))
        # sqrt(p/q) = sqrt(p q) / q
        return cls(Fraction(1, x.denominator), x.numerator * x.denominator)

    def __mul__(self, other):
        if not isinstance(other, SurdScalar):
            return SurdScalar(self.q * Fraction(other), self.d)
        return SurdScalar(self.q * other.q, self.d * other.d)

    __rmul__ = __mul__

    def inverse(self) -> "SurdScalar":
        if self.q == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return SurdScalar(1 / (self.q * self.d), self.d)

    def __truediv__(self, other):
        if not isinstance(other, SurdScalar):
            return SurdScalar(self.q / Fraction(other), self.d)
        return self * other.inverse()

    def __neg__(self):
        return SurdScalar(-self.q, self.d)

    def __add__(self, other):
        if not isinstance(other, SurdScalar):
            other = SurdScalar(Fraction(other))
        if other.q == 0:
            return self
        if self.q == 0:
            return other
        if self.d != other.d:
            raise ValueError("cannot add surds with different radicands")
        return SurdScalar(self.q + other.q, self.d)

    def is_rational(self) -> bool:
        return self.d == 1

    def rational(self) -> Fraction:
        if self.d != 1:
            raise ValueError(f"{self} is not rational")
        return self.q

    def __float__(self):
        return float(self.q) * self.d**0.5

    def __repr__(self):
        return f"{self.q}" if self.d == 1 else f"{self.q}*sqrt({self.d})"


# ---------------------------------------------------------------- polynomials

Poly = dict  # exponent tuple -> Fraction


def poly_const(c, n: int) -> Poly:
    return {tuple([0] * n): Fraction(c)} if c else {}


def poly_mul(a: Poly, b: Poly, bound: Sequence[int] | None = None) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if bound is not None and any(x > y for x, y in zip(e, bound)):
                continue
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def poly_from_affine(f: Affine, names: Sequence[str]) -> Poly:
    n = len(names)
    out = poly_const(f[ONE], n)
    for i, v in enumerate(names):
        if f[v]:
            e = [0] * n
            e[i] = 1
            out[tuple(e)] = f[v]
    extra = f.vars() - set(names)
    if extra:
        raise ValueError(f"functional depends on unknown variables {sorted(extra)}")
    return out


def poly_eval(p: Poly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for e, c in p.items():
        t = c
        for x, k in zip(point, e):
            if k:
                t *= Fraction(x) ** k
        total += t
    return total


def poly_compose_linear(p: Poly, images: Sequence[Poly], bound) -> Poly:
    """Substitute variable ``i`` by the polynomial ``images[i]``."""
    n = len(bound)
    out: Poly = {}
    for e, c in p.items():
        term = poly_const(c, n)
        for i, k in enumerate(e):
            for _ in range(k):
                term = poly_mul(term, images[i], bound)
        for ee, cc in term.items():
            out[ee] = out.get(ee, Fraction(0)) + cc
    return {e: c for e, c in out.items() if c}


# ---------------------------------------------------------------- sections


@dataclass(frozen=True)
class SectionTerm:
    """``prefactor * numerator / prod(denominators)`` times constant payload.

    ``covector`` (a 1-form on ``M_R``), ``weight`` (the Lie algebra
    coefficient) and ``transversal`` (critical-value data) are constants with
    respect to ``s`` and are carried through residues untouched.
    """

    prefactor: SurdScalar
    numerator: Poly
    denominators: tuple[tuple[Affine, int], ...]
    covector: tuple | None = None
    weight: Fraction = Fraction(1)
    transversal: object = None
    label: object = None


@dataclass(frozen=True)
class RationalSection:
    variables: tuple[str, ...]
    terms: tuple[SectionTerm, ...] = ()

    def __add__(self, other: "RationalSection") -> "RationalSection":
        if self.variables != other.variables:
            raise ValueError("sections live on different spaces")
        return RationalSection(self.variables, self.terms + other.terms)

    def arrangement(self) -> list[Affine]:
        out: list[Affine] = []
        for t in self.terms:
            for f, _ in t.denominators:
                if not any(_same_hyperplane(f, g, self.variables) for g in out):
                    out.append(f)
        return out

    def shifted(self, deltas: Sequence[Fraction]) -> "RationalSection":
        """Shift the constant part of every distinct denominator hyperplane."""
        arr = self.arrangement()
        if len(deltas) != len(arr):
            raise ValueError("one shift per arrangement member expected")

        def move(f):
            for g, d in zip(arr, deltas):
                if _same_hyperplane(f, g, self.variables):
                    scale = _ratio(f, g, self.variables)
                    return f + Affine.const(scale * Fraction(d))
            raise AssertionError

        terms = tuple(
            SectionTerm(t.prefactor, t.numerator, tuple((move(f), e) for f, e in t.denominators), t.covector, t.weight, t.transversal, t.label)
            for t in self.terms
        )
        return RationalSection(self.variables, terms)


def simple_section(variables, denominators, prefactor=1, numerator=None) -> RationalSection:
    n = len(variables)
    num = numerator if numerator is not None else poly_const(1, n)
    pre = prefactor if isinstance(prefactor, SurdScalar) else SurdScalar(Fraction(prefactor))
    dens = tuple((f, 1) if isinstance(f, Affine) else (f[0], f[1]) for f in denominators)
    return RationalSection(tuple(variables), (SectionTerm(pre, num, dens),))


def _linear(f: Affine, names) -> list[Fraction]:
    return [f[v] for v in names]


def _ratio(f: Affine, g: Affine, names) -> Fraction:
    lf, lg = _linear(f, names), _linear(g, names)
    for a, b in zip(lf, lg):
        if b:
            return a / b
    raise ValueError("zero functional")


def _same_hyperplane(f: Affine, g: Affine, names) -> bool:
    lf, lg = _linear(f, names), _linear(g, names)
    if rank([lf, lg]) > 1:
        return False
    r = _ratio(f, g, names)
    return f[ONE] == r * g[ONE]


def _value_at(f: Affine, names, point) -> Fraction:
    return f[ONE] + sum(f[v] * x for v, x in zip(names, point))


# ---------------------------------------------------------------- regularity


def is_regular(zeta: Sequence, arrangement: Sequence[Affine], names: Sequence[str], point: bool = False) -> bool:
    """Chamber regularity of a covector, or point regularity of a point.

    For a covector: ``zeta`` must avoid the span of every ``d-1`` linear parts.
    For a point: ``zeta`` must avoid every hyperplane.
    """
    d = len(names)
    if point:
        return all(_value_at(f, names, zeta) != 0 for f in arrangement)
    lin = [_linear(f, names) for f in arrangement]
    z = [Fraction(x) for x in zeta]
    for sub in combinations(lin, max(d - 1, 0)):
        if rank(list(sub) + [z]) == rank(list(sub)):
            return False
    return True


def singular_points(arrangement: Sequence[Affine], names: Sequence[str]) -> list[tuple[tuple[Fraction, ...], list[Affine]]]:
    """Points lying on at least ``d`` hyperplanes, with the hyperplanes through them."""
    d = len(names)
    distinct: list[Affine] = []
    for f in arrangement:
        if not any(_linear(f, names)):
            continue
        if not any(_same_hyperplane(f, g, names) for g in distinct):
            distinct.append(f)
    if d == 0:
        return [((), [])]
    pts: dict[tuple, list[Affine]] = {}
    for sub in combinations(distinct, d):
        mat = [_linear(f, names) for f in sub]
        if det(mat) == 0:
            continue
        x = tuple(solve(mat, [-f[ONE] for f in sub]))
        if x not in pts:
            pts[x] = [f for f in distinct if _value_at(f, names, x) == 0]
    return sorted(pts.items())


# ---------------------------------------------------------------- residues


@dataclass(frozen=True)
class ResidueValue:
    """Finite sum of ``scalar * covector * weight`` components."""

    parts: tuple = ()

    def __add__(self, other: "ResidueValue") -> "ResidueValue":
        return ResidueValue(self.parts + other.parts)

    def scalar(self) -> SurdScalar:
        """Total when no covector/weight payload is attached."""
        total: dict[int, Fraction] = {}
        for s, cov, w, _, _ in self.parts:
            total[s.d] = total.get(s.d, Fraction(0)) + s.q * w
        total = {d: q for d, q in total.items() if q}
        if not total:
            return SurdScalar(Fraction(0))
        if len(total) > 1:
            raise ValueError("sum of unlike surds")
        (d, q), = total.items()
        return SurdScalar(q, d)

    def by_label(self) -> dict:
        out: dict = {}
        for s, cov, w, tr, label in self.parts:
            out.setdefault(label, []).append((s, cov, w, tr))
        return out


def _term_residue(term: SectionTerm, names, x, basis: Sequence[Affine]) -> Fraction:
    """Iterated residue of one term at ``x`` in the coordinates ``basis``.

    Returns the rational residue (prefactor excluded) with the sign of the
    ordered basis, i.e. including ``1/det``.
    """
    d = len(names)
    vanish: list[tuple[int, int, Fraction]] = []  # (basis index, multiplicity, scale)
    others: list[tuple[Affine, int]] = []
    for f, e in term.denominators:
        if _value_at(f, names, x) == 0:
            idx = next((i for i, g in enumerate(basis) if _same_hyperplane(f, g, names)), None)
            if idx is None:
                raise NonTransverse("denominator vanishes at the point but is not in the basis")
            vanish.append((idx, e, _ratio(f, basis[idx], names)))
        else:
            others.append((f, e))
    mult = [0] * d
    const = Fraction(1)
    for idx, e, r in vanish:
        mult[idx] += e
        const /= r**e
    if any(m == 0 for m in mult):
        return Fraction(0)
    bound = [m - 1 for m in mult]
    Q = [_linear(g, names) for g in basis]
    Qinv = inverse(Q)
    # s = x + Qinv * zeta
    images = []
    for i in range(d):
        p = poly_const(x[i], d)
        for j in range(d):
            if Qinv[i][j]:
                e = [0] * d
                e[j] = 1
                p[tuple(e)] = p.get(tuple(e), Fraction(0)) + Qinv[i][j]
        images.append({k: v for k, v in p.items() if v})
    num = poly_compose_linear(term.numerator, images, bound)
    total_order = sum(bound)
    for f, e in others:
        c = _value_at(f, names, x)
        lin = poly_compose_linear(poly_from_affine(f - Affine.const(f[ONE]), names), images, bound)
        lin = {k: v / c for k, v in lin.items()}
        series = poly_const(1, d)
        power = poly_const(1, d)
        for n in range(1, total_order + 1):
            power = poly_mul(power, lin, bound)
            if not power:
                break
            coef = _binom_neg(e, n)
            for k, v in power.items():
                series[k] = series.get(k, Fraction(0)) + coef * v
        series = {k: v / c**e for k, v in series.items() if v}
        num = poly_mul(num, series, bound)
    return const * num.get(tuple(bound), Fraction(0)) / det(Q)


def _binom_neg(e: int, n: int) -> Fraction:
    """Coefficient of ``t^n`` in ``(1 + t)^(-e)``."""
    out = Fraction(1)
    for i in range(n):
        out = out * (-e - i) / (i + 1)
    return out


def iterated_residue(f: RationalSection, basis: Sequence[Affine], x: Sequence) -> ResidueValue:
    """Residue at ``x`` taken successively in the coordinates ``basis[0], basis[1], ...``."""
    names = f.variables
    x = tuple(Fraction(v) for v in x)
    if len(basis) != len(names) or det([_linear(g, names) for g in basis]) == 0:
        raise NonTransverse("ordered functionals do not form a basis")
    for g in basis:
        if _value_at(g, names, x) != 0:
            raise ValueError("basis functional does not vanish at the point")
    parts = []
    for t in f.terms:
        r = _term_residue(t, names, x, basis)
        if r:
            parts.append((t.prefactor * r, t.covector, t.weight, t.transversal, t.label))
    return ResidueValue(tuple(parts))


def jk_local(f: RationalSection, basis: Sequence[Affine], x: Sequence, chamber: Sequence | None = None) -> ResidueValue:
    """Basis-case JK residue at ``x``; ``chamber`` defaults to the positive span of ``basis``."""
    names = f.variables
    Q = [_linear(g, names) for g in basis]
    if chamber is not None:
        # chamber is given by a covector; it must lie in the open positive span
        coeffs = solve([list(col) for col in zip(*Q)], list(chamber))
        if any(c <= 0 for c in coeffs):
            raise UnsupportedChamber("chamber is not the positive span of the basis")
    sign = 1 if det(Q) > 0 else -1
    ir = iterated_residue(f, basis, x)
    return ResidueValue(tuple((s * sign, c, w, t, l) for s, c, w, t, l in ir.parts))


def _poles(f: RationalSection, arr: Sequence[Affine]) -> list[tuple[tuple[Fraction, ...], list[Affine]]]:
    """Singular points at which some single term has ``d`` independent poles.

    At any other singular point every term's residue vanishes, so these are
    the only points that can contribute.
    """
    names = f.variables
    d = len(names)
    pts: dict[tuple, list[Affine]] = {}
    for t in f.terms:
        own = [g for g, _ in t.denominators]
        for sub in combinations(own, d):
            mat = [_linear(g, names) for g in sub]
            if det(mat) == 0:
                continue
            x = tuple(solve(mat, [-g[ONE] for g in sub]))
            if x not in pts:
                pts[x] = [g for g in arr if _value_at(g, names, x) == 0]
    return sorted(pts.items())


def jk_global(f: RationalSection, arrangement: Sequence[Affine] | None = None) -> ResidueValue:
    """Sum of basis-case local residues over all singular points."""
    names = f.variables
    arr = list(arrangement) if arrangement is not None else f.arrangement()
    if rank([_linear(g, names) for g in arr] or [[0] * len(names)]) < len(names):
        return ResidueValue()
    points = singular_points(arr, names) if arrangement is not None else _poles(f, arr)
    total = ResidueValue()
    for x, through in points:
        if len(through) != len(names):
            raise NonTransverse(f"{len(through)} hyperplanes meet at {x}")
        total = total + jk_local(f, through, x)
    return total
