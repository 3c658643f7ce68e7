"""Tabulate Kronecker wall coefficients from both completion routes.

    python3 scripts/complete_kronecker.py --kappa 1 2 3 --order 4
"""

import argparse
import time

from scatter_jk import complete_inductive, complete_jk, equivalent, kronecker_diagram
from scatter_jk.algebra import primitive
from scatter_jk.formats import q2s
from scatter_jk.oracle import wall_function


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    N = args.order
    for kappa in args.kappa:
        D = kronecker_diagram(kappa, N)
        t0 = time.perf_counter()
        jk = complete_jk(D, N, args.seed)
        t1 = time.perf_counter()
        ind = complete_inductive(D, N)
        t2 = time.perf_counter()
        same = equivalent(jk, ind, N)
        print(f"kappa={kappa} N={N}  jk {t1 - t0:.2f}s  inductive {t2 - t1:.2f}s  equivalent={same}")
        print(f"  {'m':>8} {'jk':>10} {'inductive':>10}")
        for m in sorted(D.lattice.cone_points(N), key=lambda v: (sum(v), v)):
            if sum(m) < 2 or 0 in m:
                continue
            a = wall_function(jk, primitive(m), N).coeff(m)
            b = wall_function(ind, primitive(m), N).coeff(m)
            if a or b:
                print(f"  {str(m):>8} {q2s(a):>10} {q2s(b):>10}")


if __name__ == "__main__":
    main()
