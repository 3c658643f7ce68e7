"""Command-line driver.

    scatter-jk complete  [--config F] [--method inductive|jk|both]
    scatter-jk theta     [--config F] --Q x,y --m a,b [--method broken|jk|both]
    scatter-jk jk-residue --arrangement F --function F
    scatter-jk check     [--config F] [--method inductive|jk]
    scatter-jk render    [--config F] --out F.svg [--method inductive|jk]

All output is JSON on stdout. Failures print an error record to stderr and
exit nonzero. The unfolding search budget can be overridden with the
``SCATTER_JK_SEARCH_BUDGET`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .affine import Affine
from .assembler import complete_jk
from .diagram import consistency_defect, equivalent
from .formats import (
    ConfigError,
    bundled_config,
    diagram_to_json,
    dumps,
    parse_config,
    q2s,
    series_to_json,
    surd_from_json,
    surd_to_json,
)
from .jk import RationalSection, SectionTerm, SurdScalar, jk_global, poly_const
from .oracle import complete_inductive
from .render import render_svg
from .theta import theta_broken, theta_jk

EXIT_MISMATCH = 1
EXIT_ERROR = 2


class Mismatch(Exception):
    pass


def _load(args):
    path = args.config if args.config else bundled_config()
    lat, D, opts = parse_config(path)
    if getattr(args, "order", None):
        D = type(D)(D.lattice, D.walls, D.base_ring, args.order)
        opts = type(opts)(args.order, opts.seed, opts.size, opts.scale)
    if getattr(args, "seed", None) is not None:
        opts = type(opts)(opts.order, args.seed, opts.size, opts.scale)
    return D, opts


def _complete(D, N, method, seed):
    if method == "inductive":
        return complete_inductive(D, N)
    return complete_jk(D, N, seed)


def cmd_complete(args) -> dict:
    D, opts = _load(args)
    N = opts.order
    out = {"command": "complete", "method": args.method, "order": N, "seed": opts.seed}
    if args.method == "both":
        a = complete_inductive(D, N)
        b = complete_jk(D, N, opts.seed)
        same = equivalent(a, b, N)
        out["inductive"] = diagram_to_json(a)
        out["jk"] = diagram_to_json(b)
        out["equivalence"] = "equal" if same else "different"
        if not same:
            raise Mismatch(out)
    else:
        out["diagram"] = diagram_to_json(_complete(D, N, args.method, opts.seed))
    return out


def _theta_json(t: dict) -> list:
    return [{"m": list(m), "c": q2s(c)} for m, c in sorted(t.items())]


def cmd_theta(args) -> dict:
    D, opts = _load(args)
    N = opts.order
    Q = tuple(Fraction(x) for x in args.Q.split(","))
    m = tuple(int(x) for x in args.m.split(","))
    out = {"command": "theta", "method": args.method, "order": N, "Q": [q2s(x) for x in Q], "m": list(m)}
    if args.method in ("broken", "both"):
        out["broken"] = _theta_json(theta_broken(complete_inductive(D, N), Q, m, N))
    if args.method in ("jk", "both"):
        out["jk"] = _theta_json(theta_jk(D, Q, m, N, opts.seed))
    if args.method == "both":
        same = out["broken"] == out["jk"]
        out["equivalence"] = "equal" if same else "different"
        if not same:
            raise Mismatch(out)
    return out


def load_section(arrangement: dict, function: dict) -> tuple[RationalSection, list[Affine]]:
    """Build a section from the calculator's two JSON documents.

    Arrangement: ``{"variables": [...], "hyperplanes": [{"linear": [...], "constant": "p/q"}]}``.
    Function: ``{"prefactor": "p/q" | {"q", "d"}, "numerator": [{"exponents": [...], "c": "p/q"}],
    "denominators": [[index, multiplicity], ...]}``.
    """
    names = tuple(arrangement["variables"])
    hyper = []
    for h in arrangement["hyperplanes"]:
        f = Affine.const(Fraction(h.get("constant", "0")))
        if len(h["linear"]) != len(names):
            raise ValueError("hyperplane has the wrong number of coefficients")
        for v, c in zip(names, h["linear"]):
            f = f + Affine.var(v, Fraction(c))
        hyper.append(f)
    pre = function.get("prefactor", "1")
    pre = surd_from_json(pre) if isinstance(pre, dict) else SurdScalar(Fraction(pre))
    if "numerator" in function:
        num = {tuple(t["exponents"]): Fraction(t["c"]) for t in function["numerator"]}
    else:
        num = poly_const(1, len(names))
    dens = tuple((hyper[i], int(k)) for i, k in function["denominators"])
    return RationalSection(names, (SectionTerm(pre, num, dens),)), hyper


def cmd_jk_residue(args) -> dict:
    arr = json.loads(Path(args.arrangement).read_text())
    fun = json.loads(Path(args.function).read_text())
    sec, hyper = load_section(arr, fun)
    val = jk_global(sec, hyper).scalar()
    return {"command": "jk-residue", "value": surd_to_json(val)}


def cmd_check(args) -> dict:
    D, opts = _load(args)
    N = opts.order
    C = _complete(D, N, args.method, opts.seed)
    before = consistency_defect(D, N) if all(w.through_origin() for w in D.walls) else None
    after = consistency_defect(C, N)
    out = {
        "command": "check",
        "method": args.method,
        "order": N,
        "initial_defect": series_to_json(before) if before is not None else None,
        "completed_defect": series_to_json(after),
        "consistent": not after,
    }
    if after:
        raise Mismatch(out)
    return out


def cmd_render(args) -> dict:
    D, opts = _load(args)
    C = _complete(D, opts.order, args.method, opts.seed)
    svg = render_svg(C, opts.size, opts.scale)
    Path(args.out).write_text(svg)
    return {"command": "render", "out": str(args.out), "walls": len(C.walls)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scatter-jk", description="Consistent completions and theta functions via JK residues.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, methods, default):
        sp.add_argument("--config", help="config file (default: bundled kronecker.cfg)")
        sp.add_argument("--order", type=int, help="override the truncation order")
        sp.add_argument("--seed", type=int, help="override the unfolding seed")
        sp.add_argument("--method", choices=methods, default=default)

    sp = sub.add_parser("complete", help="consistent completion")
    common(sp, ["inductive", "jk", "both"], "jk")
    sp.set_defaults(func=cmd_complete)

    sp = sub.add_parser("theta", help="theta function at a point")
    common(sp, ["broken", "jk", "both"], "both")
    sp.add_argument("--Q", required=True, help="point x,y (rationals allowed)")
    sp.add_argument("--m", required=True, help="initial degree a,b")
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("jk-residue", help="global JK residue of a rational function")
    sp.add_argument("--arrangement", required=True)
    sp.add_argument("--function", required=True)
    sp.set_defaults(func=cmd_jk_residue)

    sp = sub.add_parser("check", help="consistency defect report")
    common(sp, ["inductive", "jk"], "jk")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("render", help="draw the completed diagram as SVG")
    common(sp, ["inductive", "jk"], "jk")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except Mismatch as exc:
        sys.stdout.write(dumps(exc.args[0]))
        sys.stderr.write(dumps({"error": "mismatch", "command": args.command}))
        return EXIT_MISMATCH
    except (ConfigError, ValueError, ArithmeticError, RuntimeError, OSError, KeyError) as exc:
        rec = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            rec["field"] = exc.field
            rec["line"] = exc.line
        sys.stderr.write(dumps(rec))
        return EXIT_ERROR
    sys.stdout.write(dumps(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
