import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatter_jk.affine import Affine
from scatter_jk.assembler import build_global_Z, complete_jk_detailed
from scatter_jk.diagram import kronecker_diagram
from scatter_jk.jk import (
    NonTransverse,
    RationalSection,
    SurdScalar,
    UnsupportedChamber,
    is_regular,
    iterated_residue,
    jk_global,
    jk_local,
    simple_section,
    singular_points,
)

s, z1, z2 = Affine.var("s"), Affine.var("z1"), Affine.var("z2")
u1, u2 = Affine.var("u1"), Affine.var("u2")


def val(r):
    return r.scalar()


def test_surd_normal_form():
    assert SurdScalar.sqrt(12) == SurdScalar(Fraction(2), 3)
    assert SurdScalar(Fraction(0), 5) == SurdScalar(Fraction(0))
    assert (SurdScalar.sqrt(2) * SurdScalar.sqrt(8)).rational() == 4


def test_one_dim_pole():
    f = simple_section(["s"], [s * 4 - 6])
    assert val(jk_global(f)) == SurdScalar(Fraction(1, 4))
    assert val(iterated_residue(f, [s * 4 - 6], [Fraction(3, 2)])) == SurdScalar(Fraction(1, 4))


def test_two_leaf_Z():
    # -2(u1 + u2 - 2s) at u1 = 1, u2 = 3
    f = simple_section(["s"], [(u1 + u2 - s * 2) * -2])
    f = RationalSection(f.variables, tuple(
        type(t)(t.prefactor, t.numerator, tuple((g.subs({"u1": 1, "u2": 3}), e) for g, e in t.denominators))
        for t in f.terms
    ))
    assert val(jk_global(f)) == SurdScalar(Fraction(1, 4))


def test_three_leaf_Z_all_orders():
    f = RationalSection(("z1", "z2"), simple_section(["z1", "z2"], [z1, z2], Fraction(1, 12)).terms)
    for basis in permutations([z1, z2]):
        ir = val(iterated_residue(f, list(basis), (0, 0)))
        assert ir.q == Fraction(1, 12) * (1 if basis[0] is z1 else -1)
        assert val(jk_local(f, list(basis), (0, 0))) == SurdScalar(Fraction(1, 12))
    assert val(jk_global(f)) == SurdScalar(Fraction(1, 12))


def test_holomorphic_point_gives_zero():
    f = simple_section(["z1", "z2"], [z1 - 1, z2])
    assert not jk_local(f, [z1, z2], (0, 0)).parts


def test_numerator_vanishing_gives_zero():
    f = simple_section(["s"], [s], numerator={(1,): Fraction(1)})
    assert not jk_global(f).parts


def test_higher_order_pole():
    # (1 + s)^3 / s^3 has residue 3 at the origin
    num = {(3,): Fraction(1), (2,): Fraction(3), (1,): Fraction(3), (0,): Fraction(1)}
    f = simple_section(["s"], [(s, 3)], numerator=num)
    assert val(jk_global(f)) == SurdScalar(Fraction(3))


def test_regularity():
    arr = [z1, z2, z1 + z2]
    assert is_regular((1, 1), [z1, z2], ["z1", "z2"])
    assert not is_regular((1, 0), arr, ["z1", "z2"])
    assert not is_regular((0, 3), [z1, z2], ["z1", "z2"], point=True)
    assert is_regular((1, 2), arr, ["z1", "z2"], point=True)


def test_singular_points():
    assert singular_points([s - 2], ["s"]) == [((Fraction(2),), [s - 2])]
    assert len(singular_points([s - 2, s + 1], ["s"])) == 2
    tri = [z1, z2, z1 + z2 - 1]
    assert len(singular_points(tri, ["z1", "z2"])) == 3


def test_two_point_sum():
    f = simple_section(["s"], [s - 1, s * 2 + 3])
    a = val(jk_local(f, [s - 1], (1,)))
    b = val(jk_local(f, [s * 2 + 3], (Fraction(-3, 2),)))
    assert val(jk_global(f)) == a + b


def test_low_rank_is_zero():
    f = simple_section(["z1", "z2"], [z1, z1 - 1])
    assert not jk_global(f).parts


def test_non_transverse_point():
    f = simple_section(["z1", "z2"], [z1, z2, z1 + z2])
    with pytest.raises(NonTransverse):
        jk_global(f)


def test_unsupported_chamber():
    f = simple_section(["z1", "z2"], [z1, z2])
    with pytest.raises(UnsupportedChamber):
        jk_local(f, [z1, z2], (0, 0), chamber=(1, -1))


fracs = st.fractions(-5, 5, max_denominator=7)
slopes = st.integers(1, 5)


def _explicit(slopes_, consts, pre):
    # sum over simple poles of pre / prod(a_j s + b_j), one positive slope per factor
    total = Fraction(0)
    for i, (a, b) in enumerate(zip(slopes_, consts)):
        x = -b / a
        rest = Fraction(1)
        for j, (c, d) in enumerate(zip(slopes_, consts)):
            if j != i:
                rest *= c * x + d
        total += pre / (a * rest)
    return total


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(slopes, fracs), min_size=1, max_size=4), fracs)
def test_one_dim_matches_explicit_sum(factors, pre):
    roots = [-b / a for a, b in factors]
    if len(set(roots)) < len(roots):
        return
    f = simple_section(["s"], [s * a + b for a, b in factors], pre)
    got = val(jk_global(f)).rational()
    assert got == _explicit([a for a, _ in factors], [b for _, b in factors], pre)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(slopes, fracs), min_size=1, max_size=3), st.lists(fracs, min_size=4, max_size=4))
def test_one_dim_delta_invariance(factors, deltas):
    f = simple_section(["s"], [s * a + b for a, b in factors])
    roots = [-b / a for a, b in factors]
    arr = f.arrangement()
    g = f.shifted([d / 1000 for d in deltas[: len(arr)]])
    moved = [-(b + d / 1000) / a for (a, b), d in zip(factors, deltas)]
    if len(set(roots)) < len(roots) or len(arr) < len(factors):
        return
    if len(set(moved)) < len(moved):
        return
    assert val(jk_global(f)) == val(jk_global(g))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.tuples(slopes, slopes), fracs), min_size=2, max_size=4),
)
def test_linearity(factors):
    names = ["z1", "z2"]
    dens = [z1 * a + z2 * b + c for (a, b), c in factors]
    f = simple_section(names, dens[:2])
    g = simple_section(names, dens[1:])
    try:
        lhs = jk_global(f + g)
        rhs = jk_global(f) + jk_global(g)
    except (NonTransverse, ValueError):
        return
    assert lhs.scalar() == rhs.scalar()


@settings(max_examples=30, deadline=None)
@given(st.permutations([0, 1]), fracs, fracs, st.tuples(slopes, slopes))
def test_local_order_reconciliation(order, x, y, extra):
    basis = [z1 - x, z2 - z1 - y + x]
    f = simple_section(["z1", "z2"], basis + [z1 * extra[0] + z2 * extra[1] + 7])
    pt = (x, y)
    if extra[0] * x + extra[1] * y + 7 == 0:
        return
    ordered = [basis[i] for i in order]
    assert val(jk_local(f, ordered, pt)) == val(jk_local(f, basis, pt))
    sign = 1 if order == [0, 1] else -1
    assert val(iterated_residue(f, ordered, pt)).q == sign * val(iterated_residue(f, basis, pt)).q


@pytest.fixture(scope="module")
def pipeline_sections():
    D = kronecker_diagram(2, 3)
    run = complete_jk_detailed(D, 3, seed=0)
    return [(t.k, build_global_Z(D, [t], run.params, K=t.k - 1)) for t in run.trees if t.k >= 2]


def test_pipeline_sections_delta_invariant(pipeline_sections):
    rng = random.Random(5)
    assert pipeline_sections
    for _, Z in pipeline_sections:
        base = jk_global(Z)
        for _ in range(3):
            deltas = [Fraction(rng.randint(-50, 50), 10**6) for _ in Z.arrangement()]
            moved = jk_global(Z.shifted(deltas))
            assert sorted(map(repr, moved.parts)) == sorted(map(repr, base.parts))
