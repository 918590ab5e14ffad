"""Minimal hand-written SVG line plots."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT, MARGIN = 640, 480, 60
COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#7d3c98")


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    equal_aspect: bool = False
    lines: list = field(default_factory=list)
    markers: list = field(default_factory=list)
    hlines: list = field(default_factory=list)

    def line(self, xs, ys, label: str = "") -> "Figure":
        self.lines.append((np.asarray(xs, float), np.asarray(ys, float), label))
        return self

    def marker(self, x: float, y: float, label: str = "") -> "Figure":
        self.markers.append((float(x), float(y), label))
        return self

    def hline(self, y: float, label: str = "") -> "Figure":
        self.hlines.append((float(y), label))
        return self

    def _bounds(self):
        xs = [a for x, _, _ in self.lines for a in (x.min(), x.max())] + [m[0] for m in self.markers]
        ys = [a for _, y, _ in self.lines for a in (y.min(), y.max())] + [m[1] for m in self.markers]
        ys += [h[0] for h in self.hlines]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        if self.equal_aspect:
            span = max(x1 - x0, y1 - y0)
            cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
            x0, x1, y0, y1 = cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2
        pad = lambda a, b: (a - 0.5, b + 0.5) if b - a < 1e-12 else (a - 0.05 * (b - a), b + 0.05 * (b - a))
        return (*pad(x0, x1), *pad(y0, y1))

    def render(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        w, h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
        if self.equal_aspect:
            w = h = min(w, h)

        def px(x):
            return MARGIN + (x - x0) / (x1 - x0) * w

        def py(y):
            return MARGIN + h - (y - y0) / (y1 - y0) * h

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect width="100%" height="100%" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="16">{escape(self.title)}</text>',
            f'<g class="axes" stroke="black" fill="none"><rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}"/></g>',
            f'<text x="{MARGIN + w / 2}" y="{MARGIN + h + 40}" text-anchor="middle" font-size="13">{escape(self.xlabel)}</text>',
            f'<text x="15" y="{MARGIN + h / 2}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 15 {MARGIN + h / 2})">{escape(self.ylabel)}</text>',
        ]
        for k in range(5):
            tx, ty = x0 + k * (x1 - x0) / 4, y0 + k * (y1 - y0) / 4
            out.append(f'<text x="{px(tx):.2f}" y="{MARGIN + h + 18}" text-anchor="middle" font-size="10">{tx:.3g}</text>')
            out.append(f'<text x="{MARGIN - 5}" y="{py(ty):.2f}" text-anchor="end" font-size="10">{ty:.3g}</text>')
        for y, label in self.hlines:
            out.append(
                f'<line class="hline" x1="{MARGIN}" x2="{MARGIN + w}" y1="{py(y):.2f}" y2="{py(y):.2f}" '
                f'stroke="gray" stroke-dasharray="6 4"><title>{escape(label)}</title></line>'
            )
        for i, (xs, ys, label) in enumerate(self.lines):
            step = max(1, len(xs) // 4000)
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs[::step], ys[::step]))
            color = COLORS[i % len(COLORS)]
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5">'
                f"<title>{escape(label)}</title></polyline>"
            )
        for x, y, label in self.markers:
            out.append(
                f'<circle class="marker" cx="{px(x):.2f}" cy="{py(y):.2f}" r="4" fill="{COLORS[1]}">'
                f"<title>{escape(label)}</title></circle>"
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"
