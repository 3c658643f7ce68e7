"""Affine and quadratic expressions over named variables with Fraction coefficients.

The constant term is stored under the empty name ``""``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

ONE = ""


class Affine:
    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[str, object] | None = None):
        self.c = {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def var(cls, name: str, coef=1) -> "Affine":
        return cls({name: coef})

    @classmethod
    def const(cls, value) -> "Affine":
        return cls({ONE: value})

    def __getitem__(self, name: str) -> Fraction:
        return self.c.get(name, Fraction(0))

    def __add__(self, other):
        other = other if isinstance(other, Affine) else Affine.const(other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Affine(out)

    __radd__ = __add__

    def __neg__(self):
        return Affine({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Affine) else Affine.const(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        k = Fraction(k)
        return Affine({n: k * v for n, v in self.c.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Affine):
            other = Affine.const(other)
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def vars(self):
        return {k for k in self.c if k != ONE}

    def restrict(self, names) -> "Affine":
        names = set(names)
        return Affine({k: v for k, v in self.c.items() if k in names})

    def drop(self, names) -> "Affine":
        names = set(names)
        return Affine({k: v for k, v in self.c.items() if k not in names})

    def subs(self, values: Mapping[str, object]) -> "Affine":
        out = Affine({k: v for k, v in self.c.items() if k not in values})
        for k, v in self.c.items():
            if k in values:
                val = values[k]
                out = out + (val * v if isinstance(val, Affine) else Affine.const(Fraction(val) * v))
        return out

    def value(self) -> Fraction:
        if self.vars():
            raise ValueError(f"expression still depends on {sorted(self.vars())}")
        return self[ONE]

    def __mul_affine__(self, other: "Affine") -> "Quadratic":
        out: dict = {}
        for a, x in self.c.items():
            for b, y in other.c.items():
                key = tuple(sorted((a, b)))
                out[key] = out.get(key, Fraction(0)) + x * y
        return Quadratic(out)

    def times(self, other: "Affine") -> "Quadratic":
        return self.__mul_affine__(other)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c, key=lambda n: (n == ONE, n)):
            v = self.c[k]
            parts.append(f"{v}" if k == ONE else f"{v}*{k}")
        return " + ".join(parts)


class Quadratic:
    """Sum of ``coef * a * b`` over unordered pairs of names (``""`` is 1)."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[tuple[str, str], object] | None = None):
        self.c = {tuple(sorted(k)): Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    def __add__(self, other: "Quadratic") -> "Quadratic":
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Quadratic(out)

    def __mul__(self, k):
        k = Fraction(k)
        return Quadratic({n: k * v for n, v in self.c.items()})

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1

    def __eq__(self, other):
        return isinstance(other, Quadratic) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def vars(self):
        return {n for k in self.c for n in k if n != ONE}

    def subs(self, values: Mapping[str, Affine]) -> "Quadratic":
        out = Quadratic()
        for (a, b), v in self.c.items():
            fa = values.get(a, Affine.var(a) if a != ONE else Affine.const(1))
            fb = values.get(b, Affine.var(b) if b != ONE else Affine.const(1))
            if not isinstance(fa, Affine):
                fa = Affine.const(fa)
            if not isinstance(fb, Affine):
                fb = Affine.const(fb)
            out = out + fa.times(fb) * v
        return out

    def derivative(self, name: str) -> Affine:
        out: dict = {}
        for (a, b), v in self.c.items():
            if a == name and b == name:
                out[name] = out.get(name, Fraction(0)) + 2 * v
            elif a == name:
                out[b] = out.get(b, Fraction(0)) + v
            elif b == name:
                out[a] = out.get(a, Fraction(0)) + v
        return Affine(out)

    def value(self) -> Fraction:
        if self.vars():
            raise ValueError(f"expression still depends on {sorted(self.vars())}")
        return self.c.get((ONE, ONE), Fraction(0))

    def matrix(self, names) -> list[list[Fraction]]:
        """Symmetric matrix ``A`` with ``x^T A x`` the pure quadratic part in ``names``."""
        idx = {n: i for i, n in enumerate(names)}
        n = len(names)
        a = [[Fraction(0)] * n for _ in range(n)]
        for (p, q), v in self.c.items():
            if p in idx and q in idx:
                if p == q:
                    a[idx[p]][idx[p]] += v
                else:
                    a[idx[p]][idx[q]] += v / 2
                    a[idx[q]][idx[p]] += v / 2
        return a

    def __repr__(self):
        if not self.c:
            return "0"
        return " + ".join(f"{v}*{a or '1'}*{b or '1'}" for (a, b), v in sorted(self.c.items()))
