"""Static SVG drawings of t-embeddings, T-graphs and line plots."""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from tembed.core.models import Color
from tembed.embedding.tembedding import TEmbedding
from tembed.walks.tgraph import TGraph

logger = logging.getLogger(__name__)

WIDTH = 640
MARGIN = 20
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


class _Frame:
    """Maps plane coordinates to SVG pixels with y pointing up."""

    def __init__(self, points: Iterable[complex], width: int = WIDTH):
        pts = np.array([p for p in points if not np.isnan(p)], dtype=complex)
        if not len(pts):
            pts = np.array([0j, 1 + 1j])
        self.x0, self.x1 = float(pts.real.min()), float(pts.real.max())
        self.y0, self.y1 = float(pts.imag.min()), float(pts.imag.max())
        span = max(self.x1 - self.x0, self.y1 - self.y0, 1e-12)
        self.scale = (width - 2 * MARGIN) / span
        self.width = width
        self.height = int(2 * MARGIN + (self.y1 - self.y0) * self.scale)

    def xy(self, z: complex) -> Tuple[float, float]:
        return (MARGIN + (z.real - self.x0) * self.scale, self.height - MARGIN - (z.imag - self.y0) * self.scale)

    def open(self) -> str:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')


def _points(frame: _Frame, zs: Sequence[complex]) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in (frame.xy(z) for z in zs))


def tembedding_svg(te: TEmbedding, width: int = WIDTH) -> str:
    """Faces filled by color, black faces dark."""
    frame = _Frame(te.positions, width)
    parts = [frame.open()]
    for f in te.faces:
        fill = "#333333" if f.color is Color.BLACK else "#f4f4f4"
        parts.append(f'<polygon points="{_points(frame, te.positions[list(f.cycle)])}" fill="{fill}" '
                     f'stroke="#888888" stroke-width="0.5"><title>{f.id}</title></polygon>')
    parts.append("</svg>")
    return "\n".join(parts)


def tgraph_svg(tg: TGraph, width: int = WIDTH) -> str:
    """Segments as lines, collapsed faces in red and sinks in blue."""
    frame = _Frame(tg.points, width)
    parts = [frame.open()]
    drawn = set()
    for seg in tg.segments:
        ends = sorted(set(seg.points), key=lambda p: (tg.points[p].real, tg.points[p].imag))
        if len(ends) < 2:
            continue
        a, b = ends[0], ends[-1]
        if (a, b) in drawn:
            continue
        drawn.add((a, b))
        (x1, y1), (x2, y2) = frame.xy(tg.points[a]), frame.xy(tg.points[b])
        parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="#222222" '
                     f'stroke-width="0.8"/>')
    for p in sorted(tg.degenerate):
        x, y = frame.xy(tg.points[p])
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#d62728"/>')
    for p in sorted(tg.sinks):
        x, y = frame.xy(tg.points[p])
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="#1f77b4"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def line_plot_svg(series: Dict[str, Tuple[Sequence[float], Sequence[float]]], title: str = "",
                  logx: bool = False, logy: bool = False, width: int = WIDTH,
                  markers: Optional[List[str]] = None) -> str:
    """Polylines for each named series on shared axes.

    Series listed in markers are drawn as points instead of lines.
    """
    markers = set(markers or ())
    data = {}
    for name, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        x, y = x[keep], y[keep]
        data[name] = (np.log(x) if logx else x, np.log(y) if logy else y)
    zs = [complex(a, b) for x, y in data.values() for a, b in zip(x, y)]
    frame = _Frame(zs, width)
    frame.height = max(frame.height, width // 2)
    parts = [frame.open()]
    if title:
        parts.append(f'<text x="{MARGIN}" y="{MARGIN - 6}" font-size="12" font-family="sans-serif">{title}</text>')
    for k, (name, (x, y)) in enumerate(data.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = [complex(a, b) for a, b in zip(x, y)]
        if name in markers:
            for z in pts:
                cx, cy = frame.xy(z)
                parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{color}"/>')
        elif len(pts) > 1:
            parts.append(f'<polyline points="{_points(frame, pts)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - 160}" y="{MARGIN + 14 * (k + 1)}" font-size="11" fill="{color}" '
                     f'font-family="sans-serif">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
