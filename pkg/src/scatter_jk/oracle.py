"""Order-by-order consistent completion in rank 2.

At each degree ``k`` the degree-``k`` part of the monodromy around the origin
is central modulo higher degrees, so it can be cancelled by new rays whose
generators are read off directly.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import GradedSeries, Vec, primitive
from .diagram import RAY, ScatteringDiagram, Wall, consistency_defect, crossing_sign, ray_covector


def complete_inductive(D_in: ScatteringDiagram, N: int) -> ScatteringDiagram:
    lat = D_in.lattice
    if lat.rank != 2:
        raise ValueError("inductive completion is rank 2 only")
    if D_in.base_ring != "plain":
        raise ValueError("inductive completion needs the plain base ring")
    zero = (Fraction(0), Fraction(0))
    added: dict[Vec, dict] = {}
    walls = list(D_in.walls)

    def current():
        extra = [
            Wall(d, ray_covector(lat, d), RAY, zero, GradedSeries(t, N)) for d, t in sorted(added.items()) if t
        ]
        return D_in.with_walls(walls + extra)

    for k in range(2, N + 1):
        defect = consistency_defect(current(), k).homogeneous(lat, k)
        for m, c in sorted(defect.terms.items()):
            if not lat.in_positive_part(m):
                raise RuntimeError(f"defect term {m} outside the cone")
            d = primitive(m)
            eps = crossing_sign(d, ray_covector(lat, d))
            added.setdefault(d, {})
            added[d][m] = added[d].get(m, Fraction(0)) - eps * c
    return current()


def wall_function(D: ScatteringDiagram, direction: Vec, N: int) -> GradedSeries:
    total = GradedSeries.zero(N)
    d = tuple(direction)
    for w in D.walls:
        if w.support == RAY and w.direction == d:
            total = total + w.generator.truncate(D.lattice, N)
    return total
