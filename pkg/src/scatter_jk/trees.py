"""Labelled ribbon trees, their brackets, quadratic potentials and supports.

A tree is a nested pair structure whose leaves are ``Leaf`` records. Child
order is the ribbon structure; the canonical representative puts the child
with the lexicographically smaller leaf sequence first.

Every internal edge and the root edge carries a flow variable ``s_l``,
numbered in post-order so the root edge comes last. A leaf is moved to
``u - sum s_e m_e`` along the path to the root, and the potential is the
sum over leaves of the squared wall functional at the moved point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import gcd
from typing import Sequence, Union

from .affine import ONE, Affine, Quadratic
from .algebra import GradedSeries, Lattice, Vec, add, scale
from .diagram import ScatteringDiagram, Wall
from .linalg import det, inverse, solve

U = ("u1", "u2")


@dataclass(frozen=True, order=True)
class Leaf:
    wall: int
    tag: int
    multiple: int

    def key(self):
        return (self.wall, self.tag, self.multiple)


Node = Union[Leaf, tuple]


def _leaves(node: Node) -> tuple[Leaf, ...]:
    if isinstance(node, Leaf):
        return (node,)
    return _leaves(node[0]) + _leaves(node[1])


def canonical(node: Node) -> Node:
    if isinstance(node, Leaf):
        return node
    a, b = canonical(node[0]), canonical(node[1])
    la, lb = _leaves(a), _leaves(b)
    return (a, b) if la + lb <= lb + la else (b, a)


def _aut(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    a, b = node
    return _aut(a) * _aut(b) * (2 if a == b else 1)


def wall_functional(lattice: Lattice, wall: Wall) -> Vec:
    """Primitive covector defining the wall, positively proportional to its covector."""
    n = wall.covector
    g = 0
    for a in n:
        g = gcd(g, a)
    return tuple(a // g for a in n)


@dataclass(frozen=True)
class LabelledTree:
    root: Node

    def __post_init__(self):
        object.__setattr__(self, "root", canonical(self.root))

    @cached_property
    def leaves(self) -> tuple[Leaf, ...]:
        return _leaves(self.root)

    @property
    def k(self) -> int:
        return len(self.leaves)

    @cached_property
    def aut(self) -> int:
        return _aut(self.root)

    def tags(self):
        return {(l.wall, l.tag) for l in self.leaves}

    def ribbons(self):
        """All child orderings of this tree (for ribbon-independence checks)."""

        def go(node):
            if isinstance(node, Leaf):
                yield node
                return
            for a in go(node[0]):
                for b in go(node[1]):
                    yield (a, b)
                    yield (b, a)

        return list(go(self.root))

    def wall_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for l in self.leaves:
            out[l.wall] = out.get(l.wall, 0) + 1
        return out


def leaf_degree(D: ScatteringDiagram, leaf: Leaf) -> Vec:
    return scale(leaf.multiple, D.walls[leaf.wall].direction)


def node_degree(D: ScatteringDiagram, node: Node) -> Vec:
    if isinstance(node, Leaf):
        return leaf_degree(D, node)
    return add(node_degree(D, node[0]), node_degree(D, node[1]))


def degree(D: ScatteringDiagram, tree: LabelledTree) -> Vec:
    return node_degree(D, tree.root)


# ---------------------------------------------------------------- enumeration


def _leaf_labels(D: ScatteringDiagram, N: int, J: int | None) -> list[Leaf]:
    lat = D.lattice
    out = []
    for i, w in enumerate(D.walls):
        tags = range(1, J + 1) if J else [0]
        for a in range(1, N + 1):
            m = scale(a, w.direction)
            if lat.degree(m) > N:
                break
            if w.generator.coeff(m) == 0:
                continue
            for t in tags:
                out.append(Leaf(i, t, a))
    return out


def _shapes(D: ScatteringDiagram, leaves: tuple[Leaf, ...], memo: dict) -> list[Node]:
    """Canonical binary trees on a multiset of leaves with nonzero vertex brackets."""
    if leaves in memo:
        return memo[leaves]
    if len(leaves) == 1:
        memo[leaves] = [leaves[0]]
        return memo[leaves]
    lat = D.lattice
    out = set()
    n = len(leaves)
    first = leaves[0]
    rest = leaves[1:]
    # the part containing leaves[0] enumerates every unordered split exactly once
    for r in range(0, n - 1):
        for pick in set(combinations(rest, r)):
            a = (first,) + pick
            b = list(rest)
            for x in pick:
                b.remove(x)
            b = tuple(b)
            ma = sum_degree(D, a)
            mb = sum_degree(D, b)
            if lat.pair(ma, mb) == 0:
                continue
            for ta in _shapes(D, a, memo):
                for tb in _shapes(D, b, memo):
                    out.add(canonical((ta, tb)))
    res = sorted(out, key=repr)
    memo[leaves] = res
    return res


def sum_degree(D: ScatteringDiagram, leaves) -> Vec:
    m = tuple(0 for _ in range(D.lattice.rank))
    for l in leaves:
        m = add(m, leaf_degree(D, l))
    return m


def enumerate_trees(D: ScatteringDiagram, N: int, J: int | None = None) -> list[LabelledTree]:
    """All labelled trees of degree at most ``N`` with nonvanishing brackets.

    With ``J`` set, leaves carry tags ``1..J`` and no ``(wall, tag)`` pair
    repeats; otherwise leaves are untagged and may repeat.
    """
    lat = D.lattice
    labels = _leaf_labels(D, N, J)
    out: list[LabelledTree] = []
    memo: dict = {}

    def extend(start: int, chosen: list[Leaf], used: set, deg: int):
        if chosen:
            for shape in _shapes(D, tuple(chosen), memo):
                out.append(LabelledTree(shape))
        for idx in range(start, len(labels)):
            l = labels[idx]
            d = lat.degree(leaf_degree(D, l))
            if deg + d > N:
                continue
            if J and (l.wall, l.tag) in used:
                continue
            chosen.append(l)
            used.add((l.wall, l.tag))
            extend(idx if not J else idx + 1, chosen, used, deg + d)
            chosen.pop()
            if J:
                used.discard((l.wall, l.tag))

    extend(0, [], set(), 0)
    return out


# ---------------------------------------------------------------- brackets


@dataclass(frozen=True)
class TreeBracket:
    degree: Vec
    coefficient: Fraction  # g = coefficient * x_degree
    covector: Vec
    vertex_scalars: tuple[int, ...]  # {m_A, m_B} per internal vertex, post-order
    leaf_product: Fraction

    def series(self, N: int) -> GradedSeries:
        return GradedSeries({self.degree: self.coefficient}, N)

    @property
    def degenerate(self) -> bool:
        return self.coefficient == 0 or not any(self.covector)


def tree_bracket(D: ScatteringDiagram, tree: LabelledTree | Node) -> TreeBracket:
    """Iterated bracket in the tree's ribbon order, plus ``{m_L, -}``."""
    lat = D.lattice
    node = tree.root if isinstance(tree, LabelledTree) else tree
    scalars: list[int] = []
    leaf_prod = [Fraction(1)]

    def go(n) -> Vec:
        if isinstance(n, Leaf):
            m = leaf_degree(D, n)
            leaf_prod[0] *= D.walls[n.wall].generator.coeff(m)
            return m
        ma = go(n[0])
        mb = go(n[1])
        scalars.append(lat.pair(ma, mb))
        return add(ma, mb)

    m = go(node)
    c = leaf_prod[0]
    for s in scalars:
        c *= s
    cov = tuple(-a for a in lat.covector(m)) if scalars else D.walls[node.wall].covector
    return TreeBracket(m, c, cov, tuple(scalars), leaf_prod[0])


# ---------------------------------------------------------------- potentials


def shift_name(wall: int, tag: int) -> str:
    return f"c{wall}_{tag}"


@dataclass(frozen=True)
class Edge:
    var: str
    degree: Vec


def _flow_structure(D: ScatteringDiagram, node: Node):
    """Per leaf (in ribbon order) the list of flow edges on its path to the root,
    and the post-order list of internal/root edges."""
    edges: list[Edge] = []
    paths: list[list[Edge]] = []

    def go(n, above: list[Edge]) -> Vec:
        if isinstance(n, Leaf):
            paths.append(list(above))
            return leaf_degree(D, n)
        placeholder = Edge("?", ())
        path = above + [placeholder]
        start = len(paths)
        ma = go(n[0], path)
        mb = go(n[1], path)
        m = add(ma, mb)
        e = Edge(f"s{len(edges) + 1}", m)
        edges.append(e)
        for p in paths[start:]:
            p[p.index(placeholder)] = e
        return m

    go(node, [])
    return paths, edges


@dataclass(frozen=True)
class QuadraticPotential:
    s_vars: tuple[str, ...]
    leaf_forms: tuple[Affine, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def W(self) -> Quadratic:
        q = Quadratic()
        for f in self.leaf_forms:
            q = q + f.times(f)
        return q

    @cached_property
    def _gradient(self) -> tuple[Affine, ...]:
        out = []
        for s in self.s_vars:
            g = Affine()
            for f in self.leaf_forms:
                if f[s]:
                    g = g + f * (2 * f[s])
            out.append(g)
        return tuple(out)

    def gradient(self) -> list[Affine]:
        return list(self._gradient)

    @cached_property
    def _hessian(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(g[t] for t in self.s_vars) for g in self._gradient)

    def hessian(self) -> list[list[Fraction]]:
        return [list(r) for r in self._hessian]

    @cached_property
    def _critical(self) -> tuple[Affine, ...]:
        return _solve_critical(self)

    def substitute(self, values) -> "QuadraticPotential":
        return QuadraticPotential(self.s_vars, tuple(f.subs(values) for f in self.leaf_forms), self.edges)


def build_potential(
    D: ScatteringDiagram,
    tree: LabelledTree | Node,
    shifts: dict | None = None,
    perturbation: dict | None = None,
) -> QuadraticPotential:
    """Potential with symbolic ``u1, u2`` and wall shifts.

    ``shifts`` maps ``(wall, tag)`` to a rational point; unspecified shifts
    stay symbolic as ``c{wall}_{tag}`` (the value of the wall functional at the
    shift). ``perturbation`` adds extra rational points to the shifts.
    """
    node = tree.root if isinstance(tree, LabelledTree) else tree
    paths, edges = _flow_structure(D, node)
    forms = []
    for leaf, path in zip(_leaves(node), paths):
        eta = wall_functional(D.lattice, D.walls[leaf.wall])
        pos = [Affine.var(u) for u in U]
        for e in path:
            pos = [p - Affine.var(e.var, e.degree[i]) for i, p in enumerate(pos)]
        f = sum((pos[i] * eta[i] for i in range(2)), Affine())
        key = (leaf.wall, leaf.tag)
        if shifts is not None and key in shifts:
            c = shifts[key]
            f = f - sum(Fraction(eta[i]) * Fraction(c[i]) for i in range(2))
        elif leaf.tag:
            f = f - Affine.var(shift_name(*key))
        if perturbation and key in perturbation:
            d = perturbation[key]
            f = f - sum(Fraction(eta[i]) * Fraction(d[i]) for i in range(2))
        forms.append(f)
    return QuadraticPotential(tuple(e.var for e in edges), tuple(forms), tuple(edges))


def hessian_det(W: QuadraticPotential) -> Fraction:
    return det(W.hessian())


def critical_point(W: QuadraticPotential) -> tuple[Affine, ...]:
    """Solve ``grad_s W = 0``; entries are affine in the remaining variables."""
    return W._critical


def _solve_critical(W: "QuadraticPotential") -> tuple[Affine, ...]:
    if not W.s_vars:
        return ()
    H = W.hessian()
    if det(H) == 0:
        raise ValueError("singular Hessian: degenerate tree")
    Hinv = inverse(H)
    rhs = [-g.drop(W.s_vars) for g in W.gradient()]
    return tuple(sum((rhs[j] * Hinv[i][j] for j in range(len(rhs))), Affine()) for i in range(len(rhs)))


def critical_value(W: QuadraticPotential) -> Quadratic:
    values = dict(zip(W.s_vars, critical_point(W)))
    q = Quadratic()
    for f in W.leaf_forms:
        g = f.subs(values)
        q = q + g.times(g)
    return q


# ---------------------------------------------------------------- r factor


def r_factor(D: ScatteringDiagram, tree: LabelledTree | Node) -> tuple[Fraction, Fraction]:
    """Constant 1-form on ``M_R`` as coefficients of ``(du1, du2)``.

    Leaf 1-forms are the differentials of the flowed wall functionals. At
    each vertex the two incoming 1-forms are wedged and contracted with the
    outgoing flow field, with a minus sign; the result is again a 1-form.
    """
    node = tree.root if isinstance(tree, LabelledTree) else tree
    W = build_potential(D, node)
    paths, edges = _flow_structure(D, node)
    leaf_forms = iter([f.restrict(U + W.s_vars) for f in W.leaf_forms])
    counter = [0]

    def go(n) -> Affine:
        if isinstance(n, Leaf):
            return next(leaf_forms)
        a = go(n[0])
        b = go(n[1])
        e = edges[counter[0]]
        counter[0] += 1
        return (b * a[e.var] - a * b[e.var]) * -1

    # post-order in go matches the edge numbering of _flow_structure
    r = go(node)
    extra = r.drop(U)
    if extra.c:
        raise AssertionError(f"r-factor kept flow components {extra}")
    return (r["u1"], r["u2"])


# ---------------------------------------------------------------- supports

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class TropicalSupport:
    """Cell ``{base + t * direction : lo <= t <= hi}`` on the line where the
    critical value vanishes, with the classification of the critical point.

    ``lo``/``hi`` are ``None`` when unbounded. ``tight`` lists the flow
    variables vanishing identically on the line (boundary strata).
    """

    classification: str
    covector: Vec
    base: tuple[Fraction, Fraction]
    direction: Vec
    lo: Fraction | None
    hi: Fraction | None
    tight: tuple[str, ...] = ()
    endpoints_clash: bool = False

    def point(self, t) -> tuple[Fraction, Fraction]:
        return tuple(b + Fraction(t) * d for b, d in zip(self.base, self.direction))

    def interior_point(self) -> tuple[Fraction, Fraction]:
        if self.lo is not None and self.hi is not None:
            return self.point((self.lo + self.hi) / 2)
        if self.lo is not None:
            return self.point(self.lo + 1)
        if self.hi is not None:
            return self.point(self.hi - 1)
        return self.point(0)

    def vertex(self):
        if self.lo is not None and self.hi is None:
            return self.point(self.lo)
        if self.hi is not None and self.lo is None:
            return self.point(self.hi)
        return None


def transversal_form(W: QuadraticPotential) -> list[list[Fraction]]:
    """Matrix of the pure ``u``-quadratic part of the critical value."""
    return critical_value(W).matrix(U)


def tropical_support(D: ScatteringDiagram, tree: LabelledTree, shifts: dict | None = None) -> TropicalSupport:
    """Where the tree's critical value vanishes and its critical point lies in Gamma."""
    shifts = shifts or {}
    used = tuple(sorted((key, shifts[key]) for key in tree.tags() if key in shifts))
    return _support(D, tree, used)


@lru_cache(maxsize=200_000)
def _support(D: ScatteringDiagram, tree: LabelledTree, used: tuple) -> TropicalSupport:
    shifts = dict(used)
    b = tree_bracket(D, tree)
    m = b.degree
    n = b.covector
    W = build_potential(D, tree, shifts)
    extra = {v for f in W.leaf_forms for v in f.vars()} - set(U) - set(W.s_vars)
    if extra:
        raise ValueError(f"unresolved shift parameters {sorted(extra)}")
    if not W.s_vars:
        f = W.leaf_forms[0]
        base = _point_on_line(f)
        return TropicalSupport(INTERIOR, n, base, D.walls[tree.leaves[0].wall].direction, None, None)
    if hessian_det(W) == 0:
        raise ValueError("degenerate tree has no support")
    cv = critical_value(W)
    # the zero set of the critical value is a line parallel to m
    w = (n[0], n[1])
    t = Affine.var("t")
    qt = cv.subs({"u1": t * w[0], "u2": t * w[1]})
    a2 = qt.c.get(("t", "t"), Fraction(0))
    a1 = qt.c.get((ONE, "t"), Fraction(0))
    if a2 <= 0:
        raise ValueError("critical value is not transversally positive")
    t0 = -a1 / (2 * a2)
    base = (t0 * w[0], t0 * w[1])
    if cv.subs({"u1": Affine.const(base[0]), "u2": Affine.const(base[1])}).value() != 0:
        raise ValueError("critical value is not a square of an affine function")
    p = critical_point(W)
    lo: Fraction | None = None
    hi: Fraction | None = None
    empty = False
    closed_empty = False
    tight = []
    bounds = []
    for var, pl in zip(W.s_vars, p):
        along = pl.subs({"u1": Affine.const(base[0]) + t * m[0], "u2": Affine.const(base[1]) + t * m[1]})
        alpha, beta = along[ONE], along["t"]
        if beta == 0:
            if alpha > 0:
                empty = closed_empty = True
            elif alpha == 0:
                empty = True
                tight.append(var)
            continue
        root = -alpha / beta
        bounds.append(root)
        # alpha + beta t <= 0
        if beta > 0:
            hi = root if hi is None else min(hi, root)
        else:
            lo = root if lo is None else max(lo, root)
    if lo is not None and hi is not None:
        if lo > hi:
            empty = closed_empty = True
        elif lo == hi:
            empty = True
    clash = len(bounds) != len(set(bounds))
    if not empty:
        cls = INTERIOR
    elif not closed_empty:
        cls = BOUNDARY
    else:
        cls = OUTSIDE
    return TropicalSupport(cls, n, base, m, lo, hi, tuple(tight), clash)


def _point_on_line(f: Affine) -> tuple[Fraction, Fraction]:
    a, b, c = f["u1"], f["u2"], f[ONE]
    if a:
        return (-c / a, Fraction(0))
    return (Fraction(0), -c / b)
