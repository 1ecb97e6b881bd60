"""Deterministic SVG rendering of combs.

Fixed 900x450 canvas.  A point (x, t) is drawn dark when x is outside the
partition at time t: for a teeth comb that is one vertical segment per tooth,
for an event comb one stripe of complement pieces per event.  The coordinate
transform is x_px = 900*x and y_px = 450*(1 - t/(1.05*t_max)) so the tallest
feature leaves 5% headroom; every coordinate is formatted to two decimals,
which makes the output byte-stable across runs and platforms.
"""

from __future__ import annotations

from .combs import Comb
from .intervals import complement_intervals

__all__ = ["render_comb_svg"]

WIDTH = 900.0
HEIGHT = 450.0
_INK = "#222222"

_HEADER = (
    '<svg xmlns="http://www.w3.org/2000/svg" '
    'width="900" height="450" viewBox="0 0 900 450">'
)


def _line(x1: float, y1: float, x2: float, y2: float) -> str:
    return (
        f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
        f'stroke="{_INK}" stroke-width="1"/>'
    )


def _rect(x: float, y: float, w: float, h: float) -> str:
    return f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{_INK}"/>'


def render_comb_svg(comb: Comb) -> str:
    """SVG text for a comb: baseline plus the dark (removed) region."""
    if comb.teeth is not None:
        t_max = max((t.height for t in comb.teeth), default=0.0)
    else:
        t_max = comb.events[-1][0]
    scale = 1.05 * t_max if t_max > 0.0 else 1.0

    def y_of(t: float) -> float:
        return HEIGHT * (1.0 - t / scale)

    parts = [_HEADER, _line(0.0, HEIGHT, WIDTH, HEIGHT)]
    if comb.teeth is not None:
        for tooth in comb.teeth:
            x = tooth.position * WIDTH
            parts.append(_line(x, HEIGHT, x, y_of(tooth.height)))
    else:
        events = comb.events
        times = [t for t, _ in events]
        for i, (t, value) in enumerate(events):
            bottom = y_of(t)
            top = y_of(times[i + 1]) if i + 1 < len(events) else 0.0
            for a, b in complement_intervals(value):
                if a == b:
                    if a == 0.0 or a == 1.0:
                        continue
                    parts.append(_line(a * WIDTH, bottom, a * WIDTH, top))
                else:
                    parts.append(_rect(a * WIDTH, top, (b - a) * WIDTH, bottom - top))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
