"""Walls, scattering diagrams and their monodromy in rank 2."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .algebra import GradedSeries, Lattice, Vec, WallCrossing, bch_many, derivation_multiplier, is_primitive, primitive

LINE = "line"
RAY = "ray"


@dataclass(frozen=True)
class Wall:
    """A wall ``base + R m`` (line) or ``base + R_{>=0} m`` (ray).

    ``tags`` lists the nilpotent parameters ``t_{i,j}`` multiplying the
    generator; it is empty over the plain base ring.
    """

    direction: Vec
    covector: Vec
    support: str
    base: tuple[Fraction, ...]
    generator: GradedSeries
    tags: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "direction", tuple(int(a) for a in self.direction))
        object.__setattr__(self, "covector", tuple(int(a) for a in self.covector))
        object.__setattr__(self, "base", tuple(Fraction(b) for b in self.base))
        object.__setattr__(self, "tags", tuple(sorted(tuple(t) for t in self.tags)))
        if self.support not in (LINE, RAY):
            raise ValueError(f"unknown support kind {self.support!r}")
        if not is_primitive(self.direction):
            raise ValueError(f"wall direction {self.direction} is not primitive")
        if sum(a * b for a, b in zip(self.direction, self.covector)) != 0:
            raise ValueError("covector does not vanish on the wall direction")
        for m in self.generator.terms:
            if primitive(m) != self.direction:
                raise ValueError(f"generator term {m} is off the wall direction {self.direction}")

    @property
    def crossing(self) -> WallCrossing:
        return WallCrossing(self.generator, self.covector)

    def through_origin(self) -> bool:
        return all(b == 0 for b in self.base)


@dataclass(frozen=True)
class ScatteringDiagram:
    lattice: Lattice
    walls: tuple[Wall, ...] = ()
    base_ring: str | int = "plain"
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        if self.base_ring != "plain":
            J = int(self.base_ring)
            for w in self.walls:
                for i, j in w.tags:
                    if not 1 <= j <= J:
                        raise ValueError(f"tag {(i, j)} outside 1..{J}")

    def with_walls(self, walls) -> "ScatteringDiagram":
        return replace(self, walls=tuple(walls))


def kronecker_diagram(kappa: int, N: int) -> ScatteringDiagram:
    lat = Lattice.kronecker(kappa)
    from .algebra import dilog_generator

    walls = []
    for m in ((1, 0), (0, 1)):
        walls.append(Wall(m, lat.covector(m), LINE, (0, 0), dilog_generator(lat, m, N)))
    return ScatteringDiagram(lat, tuple(walls), "plain", N)


def ray_covector(lattice: Lattice, m: Vec) -> Vec:
    """Covector ``{m, -}`` carried by outgoing rays.

    Initial lines carry ``{-, m}``; the opposite sign on rays makes the
    outgoing generators come out as ``+kappa x_(1,1) + ...``.
    """
    return tuple(-a for a in lattice.covector(m))


def _half(d) -> int:
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def _angle_cmp(a, b) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    cr = a[0] * b[1] - a[1] * b[0]
    return -1 if cr > 0 else (1 if cr < 0 else 0)


def crossing_sign(direction: Vec, covector: Vec) -> int:
    """+1 if a counterclockwise loop crosses the ray from ``{n > 0}`` to ``{n < 0}``.

    Crossings in that direction apply ``Theta``, the opposite ones ``Theta^-1``.
    """
    v = (-direction[1], direction[0])
    s = v[0] * covector[0] + v[1] * covector[1]
    if s == 0:
        raise ValueError("covector is degenerate on the loop tangent")
    return 1 if s < 0 else -1


def origin_loop(D: ScatteringDiagram) -> list[tuple[int, Vec, int]]:
    """Counterclockwise crossings ``(wall index, ray direction, sign)`` around the origin.

    Lines contribute two rays. Starting angle is the positive first axis.
    """
    rays = []
    for idx, w in enumerate(D.walls):
        if not w.through_origin():
            raise ValueError("wall does not pass through the origin; reduce asymptotically first")
        dirs = [w.direction] if w.support == RAY else [w.direction, tuple(-a for a in w.direction)]
        for d in dirs:
            rays.append((idx, d, crossing_sign(d, w.covector)))
    key = cmp_to_key(lambda a, b: _angle_cmp(a[1], b[1]) or (a[0] - b[0]))
    return sorted(rays, key=key)


@dataclass(frozen=True)
class Automorphism:
    """``exp`` of the derivation ``a -> {a, log}``."""

    lattice: Lattice
    log: GradedSeries
    order: int

    def apply(self, m0: Vec) -> dict:
        return derivation_multiplier(self.lattice, self.log, m0, self.order)

    def is_identity(self) -> bool:
        return not self.log


def path_ordered_product(D: ScatteringDiagram, loop: Sequence[tuple[int, int]], N: int) -> Automorphism:
    """Compose crossings ``(wall index, sign)`` in the listed order."""
    logs = [D.walls[i].generator.scaled(s).truncate(D.lattice, N) for i, s in loop]
    return Automorphism(D.lattice, bch_many(D.lattice, logs, N), N)


def consistency_defect(D: ScatteringDiagram, N: int) -> GradedSeries:
    if D.lattice.rank != 2:
        raise ValueError("consistency check is implemented in rank 2")
    loop = [(i, s) for i, _, s in origin_loop(D)]
    return path_ordered_product(D, loop, N).log


def normal_form(D: ScatteringDiagram, N: int) -> dict:
    """Merge walls with the same support germ and direction; drop zeros."""
    out: dict = {}
    for w in D.walls:
        key = (w.support, w.direction, w.base, w.tags)
        g = w.generator.truncate(D.lattice, N)
        out[key] = out[key] + g if key in out else g
    return {k: v for k, v in out.items() if v}


def equivalent(D1: ScatteringDiagram, D2: ScatteringDiagram, N: int) -> bool:
    if D1.lattice != D2.lattice:
        return False
    return normal_form(D1, N) == normal_form(D2, N)


def asymptotic(D: ScatteringDiagram) -> ScatteringDiagram:
    zero = tuple(Fraction(0) for _ in range(D.lattice.rank))
    return D.with_walls(replace(w, base=zero) for w in D.walls)


def wall_functions(D: ScatteringDiagram, N: int) -> dict[tuple[str, Vec], GradedSeries]:
    """Summed generators per (support kind, direction), ignoring base points."""
    out: dict = {}
    for w in D.walls:
        key = (w.support, w.direction)
        g = w.generator.truncate(D.lattice, N)
        out[key] = out[key] + g if key in out else g
    return {k: v for k, v in out.items() if v}
