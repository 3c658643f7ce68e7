"""SVG drawing of a rank-2 diagram: lines and rays through a fixed viewport."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .diagram import LINE, ScatteringDiagram


def _leading(w) -> str:
    if not w.generator.terms:
        return "0"
    m, c = min(w.generator.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    return f"{c}*x^({m[0]},{m[1]})"


def render_svg(D: ScatteringDiagram, size: int = 480, scale: float = 120.0) -> str:
    """Walls clipped to a ``size`` square; ``scale`` pixels per lattice unit."""
    if D.lattice.rank != 2:
        raise ValueError("rendering needs a rank-2 lattice")
    c = size / 2
    reach = 2 * size / scale

    def pt(x, y):
        return f"{c + float(x) * scale:.3f}", f"{c - float(y) * scale:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for w in D.walls:
        bx, by = w.base
        dx, dy = w.direction
        n = (dx * dx + dy * dy) ** 0.5
        t_hi = reach / n
        t_lo = -t_hi if w.support == LINE else 0.0
        x1, y1 = pt(float(bx) + t_lo * dx, float(by) + t_lo * dy)
        x2, y2 = pt(float(bx) + t_hi * dx, float(by) + t_hi * dy)
        kind = "line" if w.support == LINE else "ray"
        colour = "#1f4e79" if w.support == LINE else "#b03a2e"
        out.append(
            f'<line class="{kind}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" stroke-width="1.5"/>'
        )
        # label a little way out along the wall
        t_lab = 0.8 * (size / 2) / scale / n
        lx, ly = pt(float(bx) + t_lab * dx, float(by) + t_lab * dy)
        label = f"({dx},{dy}) {_leading(w)}"
        out.append(f'<text x="{lx}" y="{ly}" font-size="10" fill="{colour}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
