"""Walk through the residues behind the first two Kronecker coefficients."""

from fractions import Fraction

from scatter_jk.affine import Affine
from scatter_jk.assembler import complete_jk_detailed, tree_coefficient
from scatter_jk.diagram import kronecker_diagram
from scatter_jk.jk import jk_global, simple_section
from scatter_jk.trees import Leaf, build_potential, critical_point, critical_value, hessian_det, tree_bracket
from scatter_jk.unfolding import tag_weight

u = {"u1": Fraction(1), "u2": Fraction(4)}


def describe(D, root, shifts=None):
    W = build_potential(D, root, shifts)
    print(f"  potential    {W.W}")
    print(f"  critical pt  {critical_point(W)}")
    print(f"  value        {critical_value(W)}")
    print(f"  hessian det  {hessian_det(W)}")
    grads = [g.subs(u) for g in W.gradient()]
    if all(not g.vars() - set(W.s_vars) for g in grads):
        print(f"  JK at u=(1, 4)  {jk_global(simple_section(W.s_vars, grads)).scalar()}")


def main():
    x, y = Leaf(0, 0, 1), Leaf(1, 0, 1)
    for kappa in (1, 2, 3):
        D = kronecker_diagram(kappa, 3)
        print(f"kappa={kappa}: two leaves (x, y)")
        describe(D, (x, y))
    D = kronecker_diagram(1, 3)
    print("kappa=1: three leaves ((x, y), y), critical point on the boundary")
    describe(D, ((x, y), y))

    for kappa in (1, 2, 3):
        D = kronecker_diagram(kappa, 3)
        run = complete_jk_detailed(D, 3, seed=0)
        J = run.params.J_size
        totals: dict = {}
        counts: dict = {}
        for t in run.trees:
            m = tree_bracket(D, t).degree
            w = tag_weight(tuple((l.wall, l.tag) for l in t.leaves), J)
            totals[m] = totals.get(m, Fraction(0)) + tree_coefficient(D, t, run.params) * w
            counts[m] = counts.get(m, 0) + 1
        print(f"kappa={kappa}: folded contributions of unfolded trees (J={J})")
        for m in sorted(totals):
            print(f"  degree {m}: {counts[m]} trees, coefficient {totals[m]}")


if __name__ == "__main__":
    main()
