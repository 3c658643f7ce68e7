"""Config files and exact JSON serialization.

Config files are INI-style with typed sections::

    [lattice]
    kappa = 2            # or: skew = 0,2 ; -2,0
    cone = 1,0 ; 0,1     # optional, default is the positive quadrant
    degree = 1,1         # optional order functional

    [run]
    order = 3
    seed = 0

    [wall x]
    direction = 1,0
    support = line       # or ray
    base = 0,0
    covector = 0,-2      # optional, default {-, m}
    generator = dilog    # or explicit terms: 1,0: 1 ; 2,0: -1/2

    [render]
    size = 480
    scale = 120

In JSON, rationals are strings ``"p/q"`` (``"p"`` when integral) and surds
are ``{"q": "p/q", "d": n}``.
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .algebra import GradedSeries, Lattice, dilog_generator
from .diagram import LINE, RAY, ScatteringDiagram, Wall
from .jk import SurdScalar

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = ""
        if field:
            where = f"[{field}]"
        if line:
            where += f" (line {line})"
        super().__init__(f"{where} {message}".strip())
        self.field = field
        self.line = line


@dataclass(frozen=True)
class RunOptions:
    order: int
    seed: int = 0
    size: int = 480
    scale: float = 120.0


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    in_sec = False
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            in_sec = line.strip("[]").strip() == section
            if in_sec and key is None:
                return no
            continue
        if in_sec and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return no
    return None


def _vec(s: str, n: int | None = None, kind=int):
    try:
        out = tuple(kind(x.strip()) for x in s.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot read vector {s!r}") from exc
    if n is not None and len(out) != n:
        raise ValueError(f"expected {n} entries, got {len(out)}")
    return out


def _vecs(s: str, n: int) -> tuple:
    return tuple(_vec(part, n) for part in s.split(";") if part.strip())


def parse_config_text(text: str) -> tuple[Lattice, ScatteringDiagram, RunOptions]:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    def get(section, key, required=True, default=None):
        if not cp.has_section(section):
            if required:
                raise ConfigError(f"missing section [{section}]", section)
            return default
        if not cp.has_option(section, key):
            if required:
                raise ConfigError(f"missing field '{key}'", f"{section}.{key}", _line_of(text, section))
            return default
        return cp.get(section, key)

    def fail(section, key, msg):
        raise ConfigError(msg, f"{section}.{key}", _line_of(text, section, key))

    # lattice
    kappa = get("lattice", "kappa", required=False)
    skew = get("lattice", "skew", required=False)
    rank = int(get("lattice", "rank", required=False, default="2"))
    try:
        if skew is not None:
            skew_m = _vecs(skew, rank)
        elif kappa is not None:
            if rank != 2:
                fail("lattice", "kappa", "kappa is only meaningful in rank 2")
            k = int(kappa)
            skew_m = ((0, k), (-k, 0))
        else:
            raise ConfigError("one of 'kappa' or 'skew' is required", "lattice", _line_of(text, "lattice"))
        cone = _vecs(get("lattice", "cone", False, ";".join(",".join("1" if i == j else "0" for j in range(rank)) for i in range(rank))), rank)
        deg = _vec(get("lattice", "degree", False, ",".join(["1"] * rank)), rank)
        lat = Lattice(rank, skew_m, cone, deg)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), "lattice", _line_of(text, "lattice")) from exc

    # run
    order_s = get("run", "order")
    try:
        order = int(order_s)
    except ValueError:
        fail("run", "order", f"order must be an integer, got {order_s!r}")
    if order < 1:
        fail("run", "order", "order must be positive")
    seed = int(get("run", "seed", False, "0"))
    size = int(get("render", "size", False, "480"))
    scale = float(get("render", "scale", False, "120"))

    walls = []
    for sec in cp.sections():
        if not sec.startswith("wall"):
            continue
        try:
            d = _vec(get(sec, "direction"), rank)
        except ValueError as exc:
            fail(sec, "direction", str(exc))
        support = get(sec, "support", False, LINE).strip()
        if support not in (LINE, RAY):
            fail(sec, "support", f"support must be '{LINE}' or '{RAY}'")
        base = _vec(get(sec, "base", False, ",".join(["0"] * rank)), rank, Fraction)
        cov_s = get(sec, "covector", False)
        cov = _vec(cov_s, rank) if cov_s else lat.covector(d)
        gen_s = get(sec, "generator", False, "dilog").strip()
        try:
            if gen_s == "dilog":
                gen = dilog_generator(lat, d, order)
            else:
                terms = {}
                for part in gen_s.split(";"):
                    if not part.strip():
                        continue
                    m_s, c_s = part.split(":")
                    terms[_vec(m_s, rank)] = Fraction(c_s.strip())
                for m in terms:
                    if not _on_ray(m, d):
                        fail(sec, "generator", f"term at {m} is not a positive multiple of the direction {d}")
                gen = GradedSeries.from_terms(lat, terms, order)
            walls.append(Wall(d, cov, support, base, gen))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc), sec, _line_of(text, sec)) from exc
    D = ScatteringDiagram(lat, tuple(walls), "plain", order)
    return lat, D, RunOptions(order, seed, size, scale)


def _on_ray(m, d) -> bool:
    if not any(d):
        return False
    # m = t d with t > 0
    i = next(i for i, x in enumerate(d) if x)
    t = Fraction(m[i], d[i])
    return t > 0 and all(Fraction(a) == t * b for a, b in zip(m, d))


def parse_config(path) -> tuple[Lattice, ScatteringDiagram, RunOptions]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such config file: {p}")
    return parse_config_text(p.read_text())


def bundled_config(name: str = "kronecker.cfg") -> Path:
    return Path(__file__).parent / "data" / name


# ---------------------------------------------------------------- JSON


def q2s(x) -> str:
    return str(Fraction(x))


def s2q(s) -> Fraction:
    return Fraction(s)


def surd_to_json(s: SurdScalar) -> dict:
    return {"q": q2s(s.q), "d": s.d}


def surd_from_json(obj) -> SurdScalar:
    return SurdScalar(s2q(obj["q"]), int(obj["d"]))


def series_to_json(g: GradedSeries) -> list:
    return [{"m": list(m), "c": q2s(c)} for m, c in sorted(g.terms.items())]


def series_from_json(obj, order: int) -> GradedSeries:
    return GradedSeries({tuple(t["m"]): s2q(t["c"]) for t in obj}, order)


def lattice_to_json(lat: Lattice) -> dict:
    return {
        "rank": lat.rank,
        "skew": [list(r) for r in lat.skew],
        "cone": [list(g) for g in lat.cone_generators],
        "degree": list(lat.order_functional),
    }


def lattice_from_json(obj) -> Lattice:
    return Lattice(
        obj["rank"],
        tuple(tuple(r) for r in obj["skew"]),
        tuple(tuple(g) for g in obj["cone"]),
        tuple(obj["degree"]),
    )


def diagram_to_json(D: ScatteringDiagram) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "lattice": lattice_to_json(D.lattice),
        "order": D.order,
        "base_ring": D.base_ring,
        "walls": [
            {
                "direction": list(w.direction),
                "covector": list(w.covector),
                "support": w.support,
                "base": [q2s(b) for b in w.base],
                "generator": series_to_json(w.generator),
                "tags": [list(t) for t in w.tags],
            }
            for w in D.walls
        ],
    }


def diagram_from_json(obj) -> ScatteringDiagram:
    lat = lattice_from_json(obj["lattice"])
    N = obj["order"]
    walls = tuple(
        Wall(
            tuple(w["direction"]),
            tuple(w["covector"]),
            w["support"],
            tuple(s2q(b) for b in w["base"]),
            series_from_json(w["generator"], N),
            tuple(tuple(t) for t in w.get("tags", [])),
        )
        for w in obj["walls"]
    )
    return ScatteringDiagram(lat, walls, obj["base_ring"], N)


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def serialize(D: ScatteringDiagram) -> str:
    return dumps(diagram_to_json(D))


def deserialize(text: str) -> ScatteringDiagram:
    return diagram_from_json(json.loads(text))
