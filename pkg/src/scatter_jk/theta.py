"""Theta functions: broken lines on a completed diagram, and the marked-tree
residue formula on the unfolded initial diagram.

Results are dictionaries ``{mu: coefficient}`` standing for ``sum c z^mu``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .affine import ONE, Affine
from .algebra import Vec, add, derivation_multiplier
from .diagram import LINE, RAY, ScatteringDiagram, Wall
from .jk import RationalSection, SectionTerm, SurdScalar, jk_global, poly_const
from .linalg import det, solve
from .trees import LabelledTree, build_potential, enumerate_trees, r_factor, tree_bracket
from .unfolding import UnfoldingParams, pick_parameters, tag_weight

FAR = 10**6


# ---------------------------------------------------------------- broken lines


def _hits(P, e, wall: Wall):
    """Parameter ``t > 0`` where ``P + t e`` meets the wall support, if any."""
    d = wall.direction
    den = e[0] * d[1] - e[1] * d[0]
    if den == 0:
        return None
    # P + t e = B + s d
    bx, by = wall.base[0] - P[0], wall.base[1] - P[1]
    t = Fraction(bx * d[1] - by * d[0], 1) / den
    s = Fraction(bx * e[1] - by * e[0], 1) / den
    if t <= 0:
        return None
    if wall.support == RAY and s < 0:
        return None
    if wall.support == RAY and s == 0:
        raise ValueError("broken line passes through a wall endpoint")
    return t


def _bend_terms(D: ScatteringDiagram, wall: Wall, m_prev: Vec, N: int) -> dict:
    """Multiplier of ``z^{m_prev}`` when crossing ``wall`` along ``-m_prev``."""
    lat = D.lattice
    n_val = sum(a * b for a, b in zip(wall.covector, m_prev))
    sign = 1 if n_val > 0 else -1
    log = wall.generator.scaled(sign)
    if wall.tags:
        # nilpotent coefficient: only the first-order term survives
        out = {}
        for k, g in log.terms.items():
            p = lat.pair(m_prev, k)
            if p and lat.degree(k) <= N:
                out[k] = g * p
        return out
    f = derivation_multiplier(lat, log, m_prev, N)
    return {k: v for k, v in f.items() if any(k)}


def theta_broken(D: ScatteringDiagram, Q, m: Vec, N: int) -> dict:
    """Sum over broken lines with initial exponent ``m`` ending at ``Q``.

    Exponents gained by bending have degree at most ``N`` in total.
    """
    lat = D.lattice
    Q = tuple(Fraction(x) for x in Q)
    m = tuple(m)
    for w in D.walls:
        if _on_wall(Q, w):
            raise ValueError("Q lies on a wall")
    out: dict[Vec, Fraction] = {}

    def excess_ok(v):
        diff = tuple(a - b for a, b in zip(v, m))
        if not any(diff):
            return True
        return lat.in_cone(diff) and lat.degree(diff) <= N

    def back(P, e, coef, used):
        if e == m:
            yield coef
            return
        crossings = []
        for w in D.walls:
            t = _hits(P, e, w)
            if t is not None:
                crossings.append((t, w))
        for t, w in sorted(crossings, key=lambda x: x[0]):
            if w.tags and set(w.tags) & used:
                continue
            point = tuple(p + t * a for p, a in zip(P, e))
            d = w.direction
            j = 1
            while True:
                prev = tuple(a - j * b for a, b in zip(e, d))
                diff = tuple(a - b for a, b in zip(prev, m))
                if any(diff) and not lat.in_cone(diff):
                    break
                terms = _bend_terms(D, w, prev, N)
                c = terms.get(tuple(a - b for a, b in zip(e, prev)))
                if c:
                    yield from back(point, prev, coef * c, used | set(w.tags))
                j += 1

    for mu in [m] + [add(m, k) for k in lat.cone_points(N)]:
        if not excess_ok(mu):
            continue
        total = sum(back(Q, mu, Fraction(1), frozenset()), Fraction(0))
        if total:
            out[mu] = total
    return out


def _on_wall(Q, w: Wall) -> bool:
    d = w.direction
    rel = (Q[0] - w.base[0], Q[1] - w.base[1])
    if rel[0] * d[1] - rel[1] * d[0] != 0:
        return False
    if w.support == LINE:
        return True
    return rel[0] * d[0] + rel[1] * d[1] >= 0


# ---------------------------------------------------------------- marked trees


@dataclass(frozen=True)
class MarkedTree:
    """Core path from the marked edge to the root with subtrees attached in
    order ``L_1, ..., L_l`` (``L_1`` nearest the marked edge)."""

    m: Vec
    subtrees: tuple[LabelledTree, ...]

    @property
    def l(self) -> int:
        return len(self.subtrees)

    @property
    def k(self) -> int:
        return sum(t.k for t in self.subtrees)

    def tags(self):
        out = []
        for t in self.subtrees:
            out.extend((x.wall, x.tag) for x in t.leaves)
        return tuple(out)

    @property
    def aut(self) -> int:
        # the core is rigid; automorphisms come from the subtrees only
        a = 1
        for t in self.subtrees:
            a *= t.aut
        return a


def core_exponents(D_in: ScatteringDiagram, J: MarkedTree) -> list[Vec]:
    """``e_0 = m, e_i = e_{i-1} + m_{L_i}``."""
    es = [J.m]
    for t in J.subtrees:
        es.append(add(es[-1], tree_bracket(D_in, t).degree))
    return es


def a_factor(D_in: ScatteringDiagram, J: MarkedTree) -> tuple[Vec, Fraction]:
    """Degree and coefficient of ``h_{L_l} ... h_{L_1} z^m``."""
    lat = D_in.lattice
    e = J.m
    c = Fraction(1)
    for t in J.subtrees:
        b = tree_bracket(D_in, t)
        c *= b.coefficient * lat.pair(e, b.degree)
        e = add(e, b.degree)
    return e, c


def marked_potential(D_in: ScatteringDiagram, J: MarkedTree, shifts: dict, Q, perturbation: dict | None = None):
    """Leaf forms of the marked tree in core variables ``c1..cl`` and subtree
    variables ``L{i}s{j}``, with subtree roots at the bend points."""
    es = core_exponents(D_in, J)
    forms = []
    per_tree = []
    s_vars: list[str] = [f"c{i}" for i in range(1, J.l + 1)]
    for i, t in enumerate(J.subtrees, start=1):
        W = build_potential(D_in, t, shifts, perturbation)
        ren = {s: Affine.var(f"L{i}{s}") for s in W.s_vars}
        # bend point in the flow coordinates: u = -Q + sum_{q >= i} c_q e_q
        u = [Affine.const(-Fraction(Q[a])) for a in range(2)]
        for q in range(i, J.l + 1):
            u = [u[a] + Affine.var(f"c{q}", es[q][a]) for a in range(2)]
        ren["u1"], ren["u2"] = u
        tf = [f.subs(ren) for f in W.leaf_forms]
        forms.extend(tf)
        per_tree.append((t, W, tf))
        s_vars.extend(f"L{i}{s}" for s in W.s_vars)
    return tuple(s_vars), forms, per_tree


def _gradient(forms, s_vars):
    return [sum((f * (2 * f[s]) for f in forms if f[s]), Affine()) for s in s_vars]


def marked_r(D_in: ScatteringDiagram, J: MarkedTree) -> Fraction:
    """Recursive contraction: each subtree gives its 1-form as for walls, and
    the core vertex contracts it with its outgoing core flow, with a minus."""
    es = core_exponents(D_in, J)
    beta = Fraction(1)
    for i, t in enumerate(J.subtrees, start=1):
        r = r_factor(D_in, t)
        # the bend point moves by e_i along the outgoing core variable
        beta = -(r[0] * es[i][0] + r[1] * es[i][1]) * beta
    return beta


def classify_marked(D_in: ScatteringDiagram, J: MarkedTree, shifts: dict, Q) -> tuple[bool, tuple]:
    s_vars, forms, _ = marked_potential(D_in, J, shifts, Q)
    grads = _gradient(forms, s_vars)
    H = [[g[s] for s in s_vars] for g in grads]
    if det(H) == 0:
        return False, ()
    p = solve(H, [-g[ONE] for g in grads])
    return all(x < 0 for x in p), tuple(p)


def enumerate_marked_trees(D_in: ScatteringDiagram, params: UnfoldingParams, Q, m: Vec, N: int, mu: Vec | None = None):
    """Interior marked trees for the unfolded diagram with ``a_J != 0``."""
    lat = D_in.lattice
    pool = [t for t in enumerate_trees(D_in, N, params.J_size) if t.k == 1 or not tree_bracket(D_in, t).degenerate]
    pool.sort(key=lambda t: repr(t.root))
    out = []

    def grow(seq, e, deg, used):
        if seq:
            J = MarkedTree(m, tuple(seq))
            if mu is None or e == tuple(mu):
                ok, _ = classify_marked(D_in, J, params.shifts, Q)
                if ok:
                    out.append(J)
        for t in pool:
            b = tree_bracket(D_in, t)
            d = lat.degree(b.degree)
            if deg + d > N:
                continue
            tags = {(x.wall, x.tag) for x in t.leaves}
            if tags & used:
                continue
            if lat.pair(e, b.degree) == 0:
                continue
            seq.append(t)
            grow(seq, add(e, b.degree), deg + d, used | tags)
            seq.pop()

    grow([], tuple(m), 0, frozenset())
    return out


def marked_term(D_in: ScatteringDiagram, J: MarkedTree, params: UnfoldingParams, Q, K: int, delta: dict | None = None) -> SectionTerm:
    """Summand of the degree-``mu`` section; ``delta`` perturbs only the denominators."""
    s_vars, forms, _ = marked_potential(D_in, J, params.shifts, Q)
    k = J.k
    grads = _gradient(forms, s_vars)
    H = det([[g[s] for s in s_vars] for g in grads])
    if delta:
        _, dforms, _ = marked_potential(D_in, J, params.shifts, Q, delta)
        grads = _gradient(dforms, s_vars)
    names = tuple(f"s{j}" for j in range(1, K + 1))
    ren = {s: Affine.var(names[i]) for i, s in enumerate(s_vars)}
    dens = [(g.subs(ren), 1) for g in grads]
    dens += [(Affine.var(names[j]), 1) for j in range(len(s_vars), K)]
    sign = -1 if J.l % 2 else 1
    # full-dimensional Gaussian: (pi hbar)^(-k/2) int exp(-W/hbar) -> 2^(k/2) |H|^(-1/2)
    pre = SurdScalar.sqrt(Fraction(2) ** k * H) * sign / J.aut
    mu, a = a_factor(D_in, J)
    return SectionTerm(pre, poly_const(1, K), tuple(dens), covector=None, weight=marked_r(D_in, J) * a, label=(J, mu))


def _perturbations(Js, seed: int, scale: Fraction = Fraction(1, 10**6)) -> dict:
    rng = random.Random(seed * 104729 + 3)
    return {
        J: {tag: (scale * Fraction(rng.randint(-99, 99), 97), scale * Fraction(rng.randint(-99, 99), 89)) for tag in J.tags()}
        for J in Js
    }


def theta_section(D_in: ScatteringDiagram, Js, params: UnfoldingParams, Q, seed: int = 0) -> RationalSection:
    """Padded global section over the marked trees of one degree."""
    K = max(J.k for J in Js)
    deltas = _perturbations(Js, seed)
    names = tuple(f"s{j}" for j in range(1, K + 1))
    return RationalSection(names, tuple(marked_term(D_in, J, params, Q, K, deltas[J]) for J in Js))


def _fold_value(value, J_size: int) -> Fraction:
    tot = Fraction(0)
    for s, _, w, _, (J, _) in value.parts:
        tot += s.rational() * w * tag_weight(J.tags(), J_size)
    return tot


def theta_jk(D_in: ScatteringDiagram, Q, m: Vec, N: int, seed: int = 0, params: UnfoldingParams | None = None) -> dict:
    """Theta function at a generic ``Q``: one global residue per degree ``mu``.

    ``Q`` is pushed far out along its ray so the unfolding shifts are
    negligible; each marked tree is then folded back with its tag weight.
    """
    m = tuple(m)
    out: dict[Vec, Fraction] = {m: Fraction(1)}
    if not D_in.walls:
        return out
    if params is None:
        params = pick_parameters(D_in, N, seed)
    Qf = far_point(Q, params)
    by_mu: dict = {}
    for J in enumerate_marked_trees(D_in, params, Qf, m, N):
        by_mu.setdefault(a_factor(D_in, J)[0], []).append(J)
    for mu in sorted(by_mu):
        c = _fold_value(jk_global(theta_section(D_in, by_mu[mu], params, Qf, seed)), params.J_size)
        if c:
            out[mu] = out.get(mu, Fraction(0)) + c
    return out


def theta_jk_per_tree(D_in: ScatteringDiagram, Q, m: Vec, N: int, params: UnfoldingParams) -> dict:
    """Same sum with one unpadded residue per marked tree."""
    m = tuple(m)
    out: dict[Vec, Fraction] = {m: Fraction(1)}
    if not D_in.walls:
        return out
    Qf = far_point(Q, params)
    for J in enumerate_marked_trees(D_in, params, Qf, m, N):
        K = J.k
        sec = RationalSection(tuple(f"s{j}" for j in range(1, K + 1)), (marked_term(D_in, J, params, Qf, K),))
        mu = a_factor(D_in, J)[0]
        out[mu] = out.get(mu, Fraction(0)) + _fold_value(jk_global(sec), params.J_size)
    return {k: v for k, v in out.items() if v}


def far_point(Q, params: UnfoldingParams):
    big = max([Fraction(1)] + [abs(x) for c in params.shifts.values() for x in c])
    scale = FAR * (int(big) + 1)
    return tuple(Fraction(x) * scale for x in Q)
