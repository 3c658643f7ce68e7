from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatter_jk.diagram import kronecker_diagram, normal_form
from scatter_jk.trees import enumerate_trees
from scatter_jk.unfolding import (
    BUDGET_ENV,
    UnfoldingParams,
    admissible_unfolding,
    copies_needed,
    fold,
    pick_parameters,
    t_value,
    tag_weight,
    unfold,
)


def test_copies_needed():
    assert copies_needed(kronecker_diagram(1, 3), 3) == 3
    assert copies_needed(kronecker_diagram(2, 5), 5) == 5


def test_tag_monomial_values():
    # two distinct copies of one wall at J = 2: t^2 = 1/4, and 2 ordered choices out of 2
    assert t_value(((1, 1), (1, 2)), 2) == Fraction(1, 4)
    assert tag_weight(((1, 1), (1, 2)), 2) == Fraction(1, 2)
    assert tag_weight(((0, 1),), 3) == Fraction(1, 3)
    assert tag_weight(((0, 1), (1, 2)), 2) == Fraction(1, 4)
    assert tag_weight(((0, 1), (0, 2), (0, 3)), 2) == 0


def test_unfolded_example_weight():
    # the three-leaf example with J = 2 carries g * t_{1,1} t_{1,2} = g / 4
    g = Fraction(-1)
    assert g * t_value(((0, 1), (1, 1), (1, 2)), 2) * 2 == g / 4


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 50))
def test_fold_of_unfolded_lines_is_original(kappa, J, seed):
    D = kronecker_diagram(kappa, 3)
    params = pick_parameters(D, 2, seed) if J == 2 else UnfoldingParams(J, {(i, j): (Fraction(j, 3), -Fraction(seed, 7)) for i in range(2) for j in range(1, J + 1)})
    U = unfold(D, params)
    assert len(U.walls) == 2 * params.J_size
    assert normal_form(fold(U, params.J_size), 3) == normal_form(D, 3)


def test_unfold_rejects_tagged_input():
    D = kronecker_diagram(1, 2)
    U = unfold(D, UnfoldingParams(2))
    with pytest.raises(ValueError):
        unfold(U, UnfoldingParams(2))


def test_unshifted_copies_are_not_admissible():
    D = kronecker_diagram(1, 3)
    trees = enumerate_trees(D, 3, 3)
    zero = {(i, j): (0, 0) for i in range(2) for j in range(1, 4)}
    cert = admissible_unfolding(D, trees, UnfoldingParams(3, zero))
    assert not cert.ok and cert.tree is not None


@pytest.mark.parametrize("kappa", [1, 2])
def test_search_returns_certificate(kappa):
    D = kronecker_diagram(kappa, 3)
    params = pick_parameters(D, 3, seed=4)
    assert params.certificate.ok
    assert params.certificate.checked > 0
    assert admissible_unfolding(D, enumerate_trees(D, 3, params.J_size), params).ok


def test_search_is_seeded():
    D = kronecker_diagram(2, 3)
    assert pick_parameters(D, 3, seed=1).shifts == pick_parameters(D, 3, seed=1).shifts
    assert pick_parameters(D, 3, seed=1).shifts != pick_parameters(D, 3, seed=2).shifts


def test_zero_budget_is_an_error(monkeypatch):
    D = kronecker_diagram(1, 3)
    with pytest.raises(RuntimeError):
        pick_parameters(D, 3, budget=0)
    monkeypatch.setenv(BUDGET_ENV, "0")
    with pytest.raises(RuntimeError):
        pick_parameters(D, 3)


def test_tagged_trees_use_each_copy_once():
    D = kronecker_diagram(1, 3)
    for t in enumerate_trees(D, 3, copies_needed(D, 3)):
        tags = [(l.wall, l.tag) for l in t.leaves]
        assert len(set(tags)) == len(tags)
        assert all(1 <= l.tag <= 3 for l in t.leaves)
