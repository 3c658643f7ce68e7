"""Wall coefficients from Jeffrey-Kirwan residues of tree potentials.

For a tree with ``k`` leaves, Hessian ``H`` of its potential in the ``k-1``
flow variables, r-factor ``r`` and bracket ``g``, the contribution to the
outgoing wall is

    -1/|Aut| * 2^((k-1)/2) * |H|^(1/2) * JK(1 / prod_l d_{s_l} W) * <r, rho> a^(-1/2) * g

where ``rho`` crosses the wall from ``{n > 0}`` to ``{n < 0}`` and ``a`` is the
critical value restricted to ``rho``. Trees sharing one support cell are
combined into a single section padded to a common number of variables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .affine import ONE, Affine
from .algebra import GradedSeries, Vec, primitive
from .diagram import RAY, ScatteringDiagram, Wall, consistency_defect
from .jk import RationalSection, ResidueValue, SectionTerm, SurdScalar, jk_global, poly_const
from .linalg import matvec
from .trees import (
    BOUNDARY,
    INTERIOR,
    OUTSIDE,
    U,
    LabelledTree,
    build_potential,
    critical_point,
    enumerate_trees,
    hessian_det,
    r_factor,
    transversal_form,
    tree_bracket,
    tropical_support,
)
from .unfolding import UnfoldingParams, fold, pick_parameters, unfold


def classify_critical(D_in: ScatteringDiagram, tree: LabelledTree, params: UnfoldingParams | None) -> str:
    shifts = params.shifts if params is not None else {}
    return tropical_support(D_in, tree, shifts).classification


def gaussian_transversal(q: Sequence[Sequence], r: Sequence, rho: Sequence) -> SurdScalar:
    """Limit of the normalised Gaussian integral of ``r`` along ``rho``.

    ``q`` is the symmetric matrix of the critical value; along ``rho`` it is
    ``a t^2`` and the result is ``<r, rho> / sqrt(a)``.
    """
    a = sum(Fraction(rho[i]) * q[i][j] * Fraction(rho[j]) for i in range(len(rho)) for j in range(len(rho)))
    pairing = sum(Fraction(x) * Fraction(y) for x, y in zip(r, rho))
    if pairing == 0:
        return SurdScalar(Fraction(0))
    if a <= 0:
        raise ValueError("critical value is not positive across the wall")
    return SurdScalar.sqrt(a).inverse() * pairing


def crossing_direction(covector: Vec) -> Vec:
    """A transversal direction going from ``{n > 0}`` to ``{n < 0}``."""
    return tuple(-a for a in covector)


@dataclass(frozen=True)
class Transversal:
    form: tuple
    covector: Vec


def _u_at(point) -> dict:
    return {"u1": Affine.const(point[0]), "u2": Affine.const(point[1])}


def tree_term(
    D_in: ScatteringDiagram,
    tree: LabelledTree,
    params: UnfoldingParams | None,
    K: int,
    at: tuple | None = None,
    hat: bool = False,
) -> SectionTerm:
    """Summand of the global section for one tree, specialised at ``u = at``."""
    b = tree_bracket(D_in, tree)
    shifts = params.shifts if params is not None else {}
    W = build_potential(D_in, tree, shifts)
    k = tree.k
    H = hessian_det(W)
    sup = tropical_support(D_in, tree, shifts)
    point = at if at is not None else sup.interior_point()
    delta = params.perturbations.get(tree) if params is not None else None
    Wd = build_potential(D_in, tree, shifts, delta).substitute(_u_at(point))
    names = tuple(f"s{j}" for j in range(1, K + 1))
    dens = [(g, 1) for g in Wd.gradient()]
    dens += [(Affine.var(f"s{j}"), 1) for j in range(k, K + 1)]
    pre = SurdScalar.sqrt(Fraction(2) ** (k - 1) * H) / tree.aut
    numerator = poly_const(1, K)
    weight = b.coefficient
    if hat:
        # prod ((d W + 1) / d W)^lambda with the bracket scalars as exponents
        lams = b.vertex_scalars
        if any(l < 0 for l in lams):
            raise ValueError("negative exponent in product-of-ratios form")
        from .jk import poly_from_affine, poly_mul

        numerator = poly_const(1, K)
        dens = []
        for g, lam in zip(Wd.gradient(), lams):
            gp = poly_from_affine(g + 1, names)
            for _ in range(lam):
                numerator = poly_mul(numerator, gp)
            if lam:
                dens.append((g, lam))
        dens += [(Affine.var(f"s{j}"), 1) for j in range(k, K + 1)]
        weight = b.leaf_product
    r = r_factor(D_in, tree)
    q = transversal_form(W)
    return SectionTerm(
        pre,
        numerator,
        tuple(dens),
        covector=r,
        weight=weight,
        transversal=Transversal(tuple(tuple(row) for row in q), b.covector),
        label=tree,
    )


def build_global_Z(
    D_in: ScatteringDiagram,
    trees: Sequence[LabelledTree],
    params: UnfoldingParams | None,
    at: tuple | None = None,
    K: int | None = None,
    hat: bool = False,
) -> RationalSection:
    if not trees:
        return RationalSection(("s1",), ())
    K = K if K is not None else max(t.k for t in trees)
    names = tuple(f"s{j}" for j in range(1, K + 1))
    terms = tuple(tree_term(D_in, t, params, K, at, hat) for t in trees)
    return RationalSection(names, terms)


def transversal_integral(value: ResidueValue) -> Fraction:
    """``-lim int_rho`` of a residue value, summed over its components."""
    total: dict[int, Fraction] = {}
    for s, r, w, tr, _ in value.parts:
        rho = crossing_direction(tr.covector)
        c = -(s * gaussian_transversal(tr.form, r, rho)) * w
        total[c.d] = total.get(c.d, Fraction(0)) + c.q
    total = {d: q for d, q in total.items() if q}
    if any(d != 1 for d in total):
        raise ArithmeticError(f"wall coefficient failed to rationalise: {total}")
    return total.get(1, Fraction(0))


def wall_coefficient(D_in: ScatteringDiagram, trees: Sequence[LabelledTree], params: UnfoldingParams | None, at=None) -> Fraction:
    """Coefficient of ``x_m`` on the cell shared by ``trees`` (all of degree ``m``)."""
    live = [t for t in trees if classify_critical(D_in, t, params) == INTERIOR]
    if not live:
        return Fraction(0)
    Z = build_global_Z(D_in, live, params, at)
    return transversal_integral(jk_global(Z))


def tree_coefficient(D_in: ScatteringDiagram, tree: LabelledTree, params: UnfoldingParams | None, hat: bool = False) -> Fraction:
    """Per-tree coefficient without padding (zero unless the critical point is interior)."""
    if classify_critical(D_in, tree, params) != INTERIOR:
        return Fraction(0)
    Z = build_global_Z(D_in, [tree], params, K=tree.k - 1 if tree.k > 1 else 0, hat=hat) if tree.k > 1 else None
    if Z is None:
        return tree_bracket(D_in, tree).coefficient
    return transversal_integral(jk_global(Z))


def one_dim_Z_hat(D_in: ScatteringDiagram, tree: LabelledTree, params: UnfoldingParams | None) -> RationalSection:
    return build_global_Z(D_in, [tree], params, hat=True)


def _cell_key(D_in, tree, params):
    sup = tropical_support(D_in, tree, params.shifts)
    return (tree_bracket(D_in, tree).degree, sup.covector, sup.base, sup.vertex())


def perturb(params: UnfoldingParams, trees: Sequence[LabelledTree], seed: int, scale: Fraction = Fraction(1, 10**6)) -> UnfoldingParams:
    """Attach small rational perturbations of the shifts to every tree."""
    rng = random.Random(seed * 7919 + 17)
    pert = {}
    for t in trees:
        pert[t] = {
            (l.wall, l.tag): (scale * Fraction(rng.randint(-99, 99), 97), scale * Fraction(rng.randint(-99, 99), 89))
            for l in t.leaves
        }
    return replace(params, perturbations=pert)


@dataclass(frozen=True)
class JKCompletion:
    diagram: ScatteringDiagram
    unfolded: ScatteringDiagram
    params: UnfoldingParams
    trees: tuple


def complete_jk_detailed(D_in: ScatteringDiagram, N: int, seed: int = 0) -> JKCompletion:
    lat = D_in.lattice
    params = pick_parameters(D_in, N, seed)
    J = params.J_size
    trees = [t for t in enumerate_trees(D_in, N, J) if t.k >= 2 and not tree_bracket(D_in, t).degenerate]
    live = [t for t in trees if classify_critical(D_in, t, params) == INTERIOR]
    params = perturb(params, live, seed)
    groups: dict = {}
    for t in live:
        groups.setdefault(_cell_key(D_in, t, params), []).append(t)
    rays = []
    for key in sorted(groups, key=repr):
        group = groups[key]
        m = key[0]
        coef = wall_coefficient(D_in, group, params)
        if coef == 0:
            continue
        tags = tuple(sorted({(l.wall, l.tag) for t in group for l in t.leaves}))
        if len(group) > 1:
            # a shared cell with different tag monomials is split back per tree
            for t in group:
                c = wall_coefficient(D_in, [t], params)
                rays.append(_ray(lat, t, D_in, params, m, c, N))
            continue
        rays.append(_ray(lat, group[0], D_in, params, m, coef, N))
    D_c = unfold(D_in, params)
    D_c = D_c.with_walls(_reflect_lines(D_c.walls) + tuple(r for r in rays if r is not None))
    return JKCompletion(fold(D_c, J), D_c, params, tuple(live))


def _ray(lat, tree, D_in, params, m, coef, N):
    if coef == 0:
        return None
    sup = tropical_support(D_in, tree, params.shifts)
    v = sup.vertex()
    # the flow runs towards -m; reflecting through the origin turns the cell
    # into an outgoing ray in direction +m
    base = tuple(-x for x in v)
    d = primitive(m)
    from .diagram import ray_covector

    return Wall(d, ray_covector(lat, d), RAY, base, GradedSeries({m: coef}, N), tuple((l.wall, l.tag) for l in tree.leaves))


def _reflect_lines(walls):
    return tuple(replace(w, base=tuple(-b for b in w.base)) for w in walls)


def complete_jk(D_in: ScatteringDiagram, N: int, seed: int = 0) -> ScatteringDiagram:
    return complete_jk_detailed(D_in, N, seed).diagram
