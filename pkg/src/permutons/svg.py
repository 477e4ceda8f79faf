"""Minimal SVG emission for permutation plots and pipe-dream tilings.

No drawing dependency; documents are assembled as strings.  Pipe colors use
a fixed hue rotation keyed by the entering pipe label.
"""

from __future__ import annotations

from .hecke import Permutation
from .pipedreams import BUMP, CROSS, GOLD, PipeDream, ResolvedPipeDream, trace_pipes

__all__ = ["render_svg", "permutation_plot_svg", "pipedream_svg"]


def _svg_document(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n' + body + "</svg>\n"
    )


def _hue(i: int, n: int) -> str:
    return f"hsl({(360 * (i - 1)) // max(1, n)}, 70%, 42%)"


def permutation_plot_svg(u: Permutation, size: int = 480, dot: float | None = None) -> str:
    """Dot plot of the points (i/n, u(i)/n), y axis pointing up."""
    n = u.n
    pad = 8
    span = size - 2 * pad
    r = dot if dot is not None else max(1.0, span / (3 * n))
    rows = [
        f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" '
        f'fill="white" stroke="#999"/>'
    ]
    for i in range(1, n + 1):
        cx = pad + span * i / n
        cy = pad + span * (1 - u(i) / n)
        rows.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="#1a3b6e"/>')
    return _svg_document(size, size, "\n".join(rows) + "\n")


def pipedream_svg(pd, cell: int = 28, color_pipes: bool = True) -> str:
    """Tiling of a (possibly resolved) pipe dream.

    Resolved boxes are shaded, golden bumps get a gold background, crosses
    draw two straight strands and bumps two quarter-turn arcs.
    """
    if isinstance(pd, ResolvedPipeDream):
        base = pd.base
        tile_of = pd.tile
        resolved = pd.resolved
    elif isinstance(pd, PipeDream):
        base = pd
        tile_of = pd.tile
        resolved = frozenset()
    else:
        raise TypeError("expected a PipeDream or ResolvedPipeDream")

    shape = base.shape
    boxes = shape.boxes()
    if not boxes:
        return _svg_document(cell, cell, "")
    xs = [b.x for b in boxes]
    ys = [b.y for b in boxes]
    x0, x1 = min(xs), max(xs) + 1
    y0, y1 = min(ys), max(ys) + 1
    width = (x1 - x0) * cell + 2 * cell
    height = (y1 - y0) * cell + 2 * cell

    def corner(bx, by):
        """Screen coordinates of the box's upper-left corner."""
        return (cell + (bx - x0) * cell, cell + (y1 - by - 1) * cell)

    strand_color = {}
    if color_pipes:
        _, _, paths = trace_pipes(shape, tile_of)
        for pipe, path in paths.items():
            for box, edge in path:
                strand_color[(box, edge)] = _hue(pipe, shape.n)

    rows = []
    for b in boxes:
        key = (b.x, b.y)
        px, py = corner(b.x, b.y)
        raw = base.tiles[key]
        fill = "#f4f4f4"
        if raw == GOLD:
            fill = "#f5d76e"
        elif key in resolved:
            fill = "#c9c9c9"
        rows.append(
            f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" '
            f'fill="{fill}" stroke="#777"/>'
        )
        w_color = strand_color.get((key, "W"), "#20415f")
        s_color = strand_color.get((key, "S"), "#20415f")
        half = cell / 2
        if tile_of(key) == CROSS:
            rows.append(
                f'<line x1="{px}" y1="{py + half}" x2="{px + cell}" y2="{py + half}" '
                f'stroke="{w_color}" stroke-width="2.4"/>'
            )
            rows.append(
                f'<line x1="{px + half}" y1="{py + cell}" x2="{px + half}" y2="{py}" '
                f'stroke="{s_color}" stroke-width="2.4"/>'
            )
        else:
            rows.append(
                f'<path d="M {px} {py + half} Q {px + half} {py + half} {px + half} {py}" '
                f'fill="none" stroke="{w_color}" stroke-width="2.4"/>'
            )
            rows.append(
                f'<path d="M {px + half} {py + cell} Q {px + half} {py + half} '
                f'{px + cell} {py + half}" fill="none" stroke="{s_color}" stroke-width="2.4"/>'
            )
    return _svg_document(width, height, "\n".join(rows) + "\n")


def region_overlay_svg(u: Permutation, bp, p: float, size: int = 480) -> str:
    """Permutation plot with the traced frozen-region boundaries drawn over it."""
    from .analytic import trace_nw_boundary, trace_se_boundary

    n = u.n
    pad = 8
    span = size - 2 * pad
    r = max(0.8, span / (3 * n))

    def to_screen(x, y):
        return pad + span * x, pad + span * (1 - y)

    rows = [
        f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" '
        f'fill="white" stroke="#999"/>'
    ]
    for i in range(1, n + 1):
        cx, cy = to_screen(i / n, u(i) / n)
        rows.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="#1a3b6e"/>')
    xs = [t / 200 for t in range(201)]
    tracers = [("#c0392b", trace_se_boundary)]
    if p < 1:
        tracers.append(("#8e44ad", trace_nw_boundary))
    for color, tracer in tracers:
        pts = []
        for x in xs:
            y = tracer(bp, p, x, tol=1e-9)
            sx, sy = to_screen(x, y)
            pts.append(f"{sx:.2f},{sy:.2f}")
        rows.append(
            f'<polyline points="{" ".join(pts)}" fill="none" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
    return _svg_document(size, size, "\n".join(rows) + "\n")


def render_svg(target, **options) -> str:
    """Render a permutation plot or a pipe-dream tiling, by type."""
    if isinstance(target, Permutation):
        return permutation_plot_svg(target, **options)
    if isinstance(target, (PipeDream, ResolvedPipeDream)):
        return pipedream_svg(target, **options)
    raise TypeError(f"cannot render {type(target).__name__}")
