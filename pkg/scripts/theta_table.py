"""Theta functions at sample points in every chamber, by both routes.

    python3 scripts/theta_table.py --kappa 1 --order 3
"""

import argparse
import time

from scatter_jk import complete_inductive, kronecker_diagram
from scatter_jk.formats import q2s
from scatter_jk.theta import theta_broken, theta_jk
from scatter_jk.unfolding import pick_parameters

POINTS = [(7, 2), (2, 7), (-3, 7), (-3, -7), (7, -3)]


def show(t):
    return " + ".join(f"{q2s(c)} z^{m}" for m, c in sorted(t.items()))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa", type=int, default=1)
    ap.add_argument("--order", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    N = args.order
    D = kronecker_diagram(args.kappa, N)
    C = complete_inductive(D, N)
    params = pick_parameters(D, N, args.seed)
    for m in [(1, 0), (0, 1)]:
        for Q in POINTS:
            t0 = time.perf_counter()
            a = theta_jk(D, Q, m, N, params=params)
            b = theta_broken(C, Q, m, N)
            dt = time.perf_counter() - t0
            flag = "ok" if a == b else "MISMATCH"
            print(f"m={m} Q={Q} [{flag}, {dt:.2f}s]  {show(a)}")
            if a != b:
                print(f"    broken lines: {show(b)}")


if __name__ == "__main__":
    main()
