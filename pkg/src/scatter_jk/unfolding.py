"""Unfolding initial walls into shifted nilpotent copies, admissibility of
the shifts, a seeded parameter search, and folding back."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import perm

from .algebra import GradedSeries, Vec
from .diagram import ScatteringDiagram, Wall, asymptotic
from .trees import BOUNDARY, LabelledTree, enumerate_trees, tree_bracket, tropical_support

BUDGET_ENV = "SCATTER_JK_SEARCH_BUDGET"
DEFAULT_BUDGET = 200


@dataclass(frozen=True)
class Certificate:
    ok: bool
    tree: LabelledTree | None = None
    reason: str = ""
    checked: int = 0


@dataclass(frozen=True)
class UnfoldingParams:
    J_size: int
    shifts: dict = field(default_factory=dict)  # (wall, tag) -> point
    perturbations: dict = field(default_factory=dict)  # tree -> {(wall, tag): point}
    certificate: Certificate | None = None
    seed: int | None = None

    def __post_init__(self):
        fixed = {tuple(k): tuple(Fraction(x) for x in v) for k, v in self.shifts.items()}
        object.__setattr__(self, "shifts", fixed)

    def shift(self, wall: int, tag: int):
        return self.shifts.get((wall, tag), (Fraction(0), Fraction(0)))


def copies_needed(D_in: ScatteringDiagram, N: int) -> int:
    """Largest number of leaves a tree of degree ``N`` can put on one wall."""
    lat = D_in.lattice
    return max([1] + [N // lat.degree(w.direction) for w in D_in.walls])


def unfold(D_in: ScatteringDiagram, params: UnfoldingParams) -> ScatteringDiagram:
    if D_in.base_ring != "plain":
        raise ValueError("can only unfold a plain diagram")
    walls = []
    for i, w in enumerate(D_in.walls):
        for j in range(1, params.J_size + 1):
            c = params.shift(i, j)
            base = tuple(b + x for b, x in zip(w.base, c))
            walls.append(replace(w, base=base, tags=((i, j),)))
    return ScatteringDiagram(D_in.lattice, tuple(walls), params.J_size, D_in.order)


def admissible_unfolding(D_in: ScatteringDiagram, trees, params: UnfoldingParams) -> Certificate:
    """Every tree's critical point must avoid the boundary of Gamma on its
    support line, and the ends of the support cell must be cut out by a single
    constraint each."""
    n = 0
    for tree in trees:
        if tree.k < 2 or tree_bracket(D_in, tree).degenerate:
            continue
        n += 1
        sup = tropical_support(D_in, tree, params.shifts)
        if sup.classification == BOUNDARY:
            return Certificate(False, tree, f"critical point stuck on stratum {sup.tight}", n)
        if sup.tight:
            return Certificate(False, tree, f"flow variables {sup.tight} vanish on the support", n)
        if sup.endpoints_clash:
            return Certificate(False, tree, "two boundary strata meet the support line at one point", n)
    return Certificate(True, None, "", n)


def _candidate(rng: random.Random, den: int) -> Fraction:
    return Fraction(rng.randint(-4 * den, 4 * den), den)


def pick_parameters(D_in: ScatteringDiagram, N: int, seed: int = 0, budget: int | None = None) -> UnfoldingParams:
    """Seeded search over rational shifts, with denominators growing per attempt."""
    if budget is None:
        budget = int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))
    J = copies_needed(D_in, N)
    trees = enumerate_trees(D_in, N, J)
    rng = random.Random(seed)
    last = None
    for attempt in range(budget):
        den = 7 + 4 * attempt
        shifts = {}
        for i, w in enumerate(D_in.walls):
            normal = (-w.direction[1], w.direction[0])
            for j in range(1, J + 1):
                t = _candidate(rng, den)
                shifts[(i, j)] = (t * normal[0], t * normal[1])
        params = UnfoldingParams(J, shifts, seed=seed)
        cert = admissible_unfolding(D_in, trees, params)
        if cert.ok:
            return replace(params, certificate=cert)
        last = cert
    raise RuntimeError(f"no admissible unfolding within {budget} attempts; last failure: {last}")


def t_value(tags, J: int) -> Fraction:
    """The tag monomial evaluated at ``t = 1/J``."""
    return Fraction(1, J ** len(tags))


def tag_weight(tags, J: int) -> Fraction:
    """Fold weight of a tag monomial: ``t = 1/J`` times ``J^k / (J)_k`` per wall."""
    counts: dict[int, int] = {}
    for i, _ in tags:
        counts[i] = counts.get(i, 0) + 1
    w = Fraction(1)
    for k in counts.values():
        if k > J:
            return Fraction(0)
        w *= Fraction(1, J**k) * Fraction(J**k, perm(J, k))
    return w


def fold(D_c: ScatteringDiagram, J_size: int) -> ScatteringDiagram:
    """Evaluate tag monomials, normalise per wall, reduce to the origin and merge."""
    lat = D_c.lattice
    merged: dict = {}
    order = []
    for w in D_c.walls:
        g = w.generator.scaled(tag_weight(w.tags, J_size))
        key = (w.support, w.direction, w.covector)
        if key not in merged:
            order.append(key)
            merged[key] = g
        else:
            merged[key] = merged[key] + g
    zero = tuple(Fraction(0) for _ in range(lat.rank))
    walls = [Wall(d, cov, sup, zero, merged[(sup, d, cov)]) for (sup, d, cov) in order if merged[(sup, d, cov)]]
    return asymptotic(ScatteringDiagram(lat, tuple(walls), "plain", D_c.order))
