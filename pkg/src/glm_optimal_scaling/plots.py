"""SVG transformation plots and category distribution charts.

Plots are plain SVG 1.1 strings built without a plotting library; output is
deterministic apart from an optional timestamp comment.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from glm_optimal_scaling.models.fitted import QuantificationSet

SPLINE_GRID_POINTS = 100

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 30, 50, 110

PRIMARY_COLOR = "#1f77b4"
COMPARE_COLOR = "#d62728"
OUTCOME_COLORS = ("#9ecae1", "#3182bd")


def _esc(text: str) -> str:
    return escape(text, {'"': "&quot;"})


@dataclass(frozen=True)
class PlotPoint:
    series: str
    x: float
    y: float
    label: str


def category_x(q: QuantificationSet) -> np.ndarray:
    """Equally spaced for unordered predictors, value-spaced otherwise."""
    if q.encoding.is_ordered:
        return np.asarray(q.encoding.positions, dtype=np.float64)
    return np.arange(1, q.encoding.n_categories + 1, dtype=np.float64)


def transformation_points(q: QuantificationSet, series: str = "fit") -> list[PlotPoint]:
    """Category quantifications, plus a dense curve for fitted splines."""
    xs = category_x(q)
    points = [
        PlotPoint(series=series, x=float(x), y=float(v), label=label)
        for x, v, label in zip(xs, q.v, q.labels, strict=True)
    ]
    if q.spline is not None and q.basis is not None:
        grid = np.linspace(xs.min(), xs.max(), SPLINE_GRID_POINTS)
        points.extend(
            PlotPoint(series=f"{series}-spline", x=float(x), y=float(y), label="")
            for x, y in zip(grid, q.spline_values(grid), strict=True)
        )
    return points


class _Frame:
    """Maps data coordinates into the plotting panel."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]) -> None:
        self.x0, self.x1 = min(xs), max(xs)
        low, high = min(ys), max(ys)
        pad = 0.08 * (high - low) if high > low else 1.0
        self.y0, self.y1 = low - pad, high + pad
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 1.0, self.x1 + 1.0

    def px(self, x: float) -> float:
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y: float) -> float:
        return HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)


def _header(title: str, timestamp: str | None) -> list[str]:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if timestamp:
        lines.append(f"<!-- generated {_esc(timestamp)} -->")
    lines += [
        f"<title>{_esc(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16" '
        f'font-family="Arial">{_esc(title)}</text>',
    ]
    return lines


def _axes(frame: _Frame) -> list[str]:
    bottom = HEIGHT - BOTTOM
    lines = [
        f'<line x1="{LEFT}" y1="{bottom}" x2="{WIDTH - RIGHT}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="black"/>',
    ]
    for value in np.linspace(frame.y0, frame.y1, 5):
        y = frame.py(float(value))
        lines.append(
            f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11" '
            f'font-family="Arial">{value:.2f}</text>'
        )
    if frame.y0 < 0 < frame.y1:
        y = frame.py(0.0)
        lines.append(
            f'<line x1="{LEFT}" y1="{y:.2f}" x2="{WIDTH - RIGHT}" y2="{y:.2f}" '
            'stroke="#cccccc" stroke-dasharray="4,3"/>'
        )
    return lines


def _polyline(frame: _Frame, xs: Sequence[float], ys: Sequence[float], color: str) -> str:
    points = " ".join(f"{frame.px(x):.2f},{frame.py(y):.2f}" for x, y in zip(xs, ys, strict=True))
    return f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>'


def _markers(
    frame: _Frame, xs: Sequence[float], ys: Sequence[float], color: str, square: bool
) -> list[str]:
    lines = []
    for x, y in zip(xs, ys, strict=True):
        cx, cy = frame.px(x), frame.py(y)
        if square:
            lines.append(
                f'<rect x="{cx - 4:.2f}" y="{cy - 4:.2f}" width="8" height="8" fill="{color}"/>'
            )
        else:
            lines.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4" fill="{color}"/>')
    return lines


def _series(
    frame: _Frame, points: list[PlotPoint], series: str, color: str, square: bool
) -> list[str]:
    categories = [p for p in points if p.series == series]
    curve = [p for p in points if p.series == f"{series}-spline"]
    xs, ys = [p.x for p in categories], [p.y for p in categories]
    lines = _markers(frame, xs, ys, color, square)
    if curve:
        lines.append(_polyline(frame, [p.x for p in curve], [p.y for p in curve], color))
    else:
        lines.append(_polyline(frame, xs, ys, color))
    return lines


def transformation_svg(
    q: QuantificationSet,
    beta: float,
    compare: tuple[QuantificationSet, float] | None = None,
    timestamp: str | None = None,
) -> str:
    """Quantifications of one predictor against its original categories.

    ``compare`` overlays a second fit of the same predictor (squares) on the
    primary one (circles). The coefficients are printed beneath the panel.
    """
    points = transformation_points(q, "fit")
    if compare is not None:
        points += transformation_points(compare[0], "compare")
    frame = _Frame([p.x for p in points], [p.y for p in points])

    lines = _header(q.name, timestamp) + _axes(frame)
    lines += _series(frame, points, "fit", PRIMARY_COLOR, square=False)
    if compare is not None:
        lines += _series(frame, points, "compare", COMPARE_COLOR, square=True)

    bottom = HEIGHT - BOTTOM
    for point in (p for p in points if p.series == "fit"):
        x = frame.px(point.x)
        lines.append(
            f'<text x="{x:.2f}" y="{bottom + 16}" text-anchor="end" font-size="10" '
            f'font-family="Arial" transform="rotate(-35 {x:.2f} {bottom + 16})">'
            f"{_esc(point.label)}</text>"
        )
    caption = f"β = {beta:.2f}"
    if compare is not None:
        caption += f"   (comparison β = {compare[1]:.2f})"
    lines.append(
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 16}" text-anchor="middle" font-size="13" '
        f'font-family="Arial">{_esc(caption)}</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def distribution_svg(
    name: str,
    labels: Sequence[str],
    counts_y0: Sequence[int],
    counts_y1: Sequence[int],
    timestamp: str | None = None,
) -> str:
    """Stacked bars of category counts split by outcome (y=0 below, y=1 on top)."""
    totals = [a + b for a, b in zip(counts_y0, counts_y1, strict=True)]
    top = max(totals) if totals else 1
    n = max(1, len(labels))
    panel = WIDTH - LEFT - RIGHT
    gap = 6
    bar_w = (panel - (n - 1) * gap) / n
    scale = (HEIGHT - TOP - BOTTOM) / max(top, 1)
    bottom = HEIGHT - BOTTOM

    lines = _header(f"{name}: observations per category", timestamp)
    lines.append(
        f'<line x1="{LEFT}" y1="{bottom}" x2="{WIDTH - RIGHT}" y2="{bottom}" stroke="black"/>'
    )
    for i, (label, c0, c1) in enumerate(zip(labels, counts_y0, counts_y1, strict=True)):
        x = LEFT + i * (bar_w + gap)
        h0, h1 = c0 * scale, c1 * scale
        lines.append(
            f'<rect x="{x:.2f}" y="{bottom - h0:.2f}" width="{bar_w:.2f}" height="{h0:.2f}" '
            f'fill="{OUTCOME_COLORS[0]}"/>'
        )
        lines.append(
            f'<rect x="{x:.2f}" y="{bottom - h0 - h1:.2f}" width="{bar_w:.2f}" '
            f'height="{h1:.2f}" fill="{OUTCOME_COLORS[1]}"/>'
        )
        cx = x + bar_w / 2
        lines.append(
            f'<text x="{cx:.2f}" y="{bottom - h0 - h1 - 4:.2f}" text-anchor="middle" '
            f'font-size="10" font-family="Arial">{c0 + c1}</text>'
        )
        lines.append(
            f'<text x="{cx:.2f}" y="{bottom + 16}" text-anchor="end" font-size="10" '
            f'font-family="Arial" transform="rotate(-35 {cx:.2f} {bottom + 16})">'
            f"{_esc(label)}</text>"
        )
    for i, text in enumerate(("y = 0", "y = 1")):
        y = HEIGHT - 30
        x = WIDTH / 2 - 80 + 110 * i
        lines.append(
            f'<rect x="{x:.1f}" y="{y - 10}" width="12" height="12" fill="{OUTCOME_COLORS[i]}"/>'
        )
        lines.append(
            f'<text x="{x + 18:.1f}" y="{y}" font-size="12" font-family="Arial">{text}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
