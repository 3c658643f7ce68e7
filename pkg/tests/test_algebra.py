from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatter_jk.algebra import (
    GradedSeries,
    Lattice,
    WallCrossing,
    bch,
    bch_many,
    derivation_multiplier,
    dilog_generator,
    exp_action,
    lie_bracket,
    primitive,
)

N = 4
LAT = Lattice.kronecker(2)


def points(lat, n):
    return lat.cone_points(n)


coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@st.composite
def series(draw, lat=LAT, n=N):
    pts = points(lat, n)
    chosen = draw(st.lists(st.sampled_from(pts), max_size=4, unique=True))
    return GradedSeries({m: draw(coeffs) for m in chosen}, n)


@st.composite
def wall_logs(draw, lat=LAT, n=N):
    d = draw(st.sampled_from([(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)]))
    terms = {}
    j = 1
    while lat.degree((j * d[0], j * d[1])) <= n:
        terms[(j * d[0], j * d[1])] = draw(coeffs)
        j += 1
    return d, GradedSeries(terms, n)


def test_kronecker_lattice():
    lat = Lattice.kronecker(3)
    assert lat.pair((1, 0), (0, 1)) == 3
    assert lat.covector((1, 0)) == (0, -3)
    assert lat.degree((2, 5)) == 7
    assert (1, 1) in lat.cone_points(2)


@pytest.mark.parametrize(
    "skew",
    [((0, 1), (1, 0)), ((0, 1, 0), (-1, 0, 0))],
)
def test_lattice_rejects_bad_skew(skew):
    with pytest.raises(ValueError):
        Lattice(2, skew, ((1, 0), (0, 1)), (1, 1))


def test_series_rejects_points_outside_cone():
    with pytest.raises(ValueError):
        GradedSeries.from_terms(LAT, {(-1, 2): 1}, 3)


def test_dilog_generator_terms():
    g = dilog_generator(LAT, (1, 0), 3)
    assert g.terms == {(1, 0): -1, (2, 0): Fraction(1, 4), (3, 0): Fraction(-1, 9)}


def test_bracket_of_monomials():
    x = GradedSeries({(1, 0): 1}, 3)
    y = GradedSeries({(0, 1): 1}, 3)
    assert lie_bracket(LAT, x, y, 3).terms == {(1, 1): 2}


def test_wall_action_on_transverse_monomial():
    # {(0,1),(1,0)} = -2, so log = x acts on z^(0,1) by exp(-2x)
    lat = Lattice.kronecker(2)
    w = WallCrossing(GradedSeries({(1, 0): 1}, 4), lat.covector((1, 0)))
    f = exp_action(lat, w, (0, 1), 4)
    expected = {(0, 0): Fraction(1), (1, 0): Fraction(-2), (2, 0): Fraction(2), (3, 0): Fraction(-4, 3), (4, 0): Fraction(2, 3)}
    assert f == expected


def test_dilog_wall_gives_binomial_multiplier():
    # {(0,1), j(1,0)} = -2j turns the dilogarithm into 2 log(1+x)
    lat = Lattice.kronecker(2)
    g = dilog_generator(lat, (1, 0), 4)
    f = derivation_multiplier(lat, g, (0, 1), 4)
    assert f == {(0, 0): 1, (1, 0): 2, (2, 0): 1}


def test_bch_low_order():
    lat = Lattice.kronecker(1)
    x = GradedSeries({(1, 0): 1}, 3)
    y = GradedSeries({(0, 1): 1}, 3)
    z = bch(lat, x, y, 3)
    assert z.terms == {
        (1, 0): 1,
        (0, 1): 1,
        (1, 1): Fraction(1, 2),
        (2, 1): Fraction(1, 12),
        (1, 2): Fraction(1, 12),
    }


def test_bch_many_empty_and_single():
    x = GradedSeries({(1, 0): 1}, 3)
    assert not bch_many(LAT, [], 3)
    assert bch_many(LAT, [x], 3) == x


@settings(max_examples=40, deadline=None)
@given(series(), series())
def test_bracket_antisymmetric(a, b):
    assert lie_bracket(LAT, a, b, N) == -lie_bracket(LAT, b, a, N)


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_jacobi(a, b, c):
    def br(p, q):
        return lie_bracket(LAT, p, q, N)

    total = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))
    assert not total


def _apply(lat, log, poly, n):
    """Act with exp({., log}) on a Laurent polynomial ``{m: c}``."""
    out = {}
    for m, c in poly.items():
        for k, f in derivation_multiplier(lat, log, m, n).items():
            key = (m[0] + k[0], m[1] + k[1])
            if lat.degree(k) <= n:
                out[key] = out.get(key, Fraction(0)) + c * f
    return {k: v for k, v in out.items() if v}


def _truncate(lat, poly, base, n):
    return {k: v for k, v in poly.items() if lat.degree((k[0] - base[0], k[1] - base[1])) <= n}


@settings(max_examples=30, deadline=None)
@given(wall_logs(), st.sampled_from([(0, 1), (1, 0), (1, -1), (2, 3)]))
def test_exp_inverse_is_identity(wl, m0):
    d, log = wl
    lat = LAT
    once = _apply(lat, log, {m0: Fraction(1)}, N)
    back = _truncate(lat, _apply(lat, -log, once, N), m0, N)
    assert back == {m0: 1}


@settings(max_examples=25, deadline=None)
@given(series(n=3), series(n=3), st.sampled_from([(0, 1), (1, 0), (1, 1), (-1, 2)]))
def test_bch_matches_composed_action(x, y, m0):
    # independent route: compose the two actions on monomials directly
    lat, n = LAT, 3
    composed = _truncate(lat, _apply(lat, x, _apply(lat, y, {m0: Fraction(1)}, n), n), m0, n)
    # a -> {a, X} reverses the order of composition
    via_bch = _truncate(lat, _apply(lat, bch(lat, y, x, n), {m0: Fraction(1)}, n), m0, n)
    assert composed == via_bch


def test_primitive():
    assert primitive((4, 6)) == (2, 3)
    assert primitive((0, -5)) == (0, -1)
