"""SVG emission for planar configurations, regions and polygons, in the
style of the staircase-and-boxes figures: curves as polylines, the
parameter boxes shaded, marked regions filled."""

from __future__ import annotations

from fractions import Fraction

from .planar import Configuration, Polygon, Region

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22"]


def _fmt(x) -> str:
    return f"{float(x):.4f}"


class SvgCanvas:
    def __init__(self, bounds, size=640, margin=30):
        (self.x0, self.y0), (self.x1, self.y1) = bounds
        span_x = float(self.x1 - self.x0) or 1.0
        span_y = float(self.y1 - self.y0) or 1.0
        self.scale = (size - 2 * margin) / max(span_x, span_y)
        self.margin = margin
        self.width = int(span_x * self.scale) + 2 * margin
        self.height = int(span_y * self.scale) + 2 * margin
        self.parts = []

    def pt(self, p):
        x = self.margin + (float(p[0]) - float(self.x0)) * self.scale
        y = self.height - self.margin - (float(p[1]) - float(self.y0)) * self.scale
        return f"{x:.2f},{y:.2f}"

    def polyline(self, pts, color, width=2, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        path = " ".join(self.pt(p) for p in pts)
        self.parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}"'
            f' stroke-width="{width}"{d}/>'
        )

    def polygon(self, pts, fill, opacity=0.5):
        path = " ".join(self.pt(p) for p in pts)
        self.parts.append(
            f'<polygon points="{path}" fill="{fill}" opacity="{opacity}"'
            f' stroke="none"/>'
        )

    def dot(self, p, color="#000"):
        x, y = self.pt(p).split(",")
        self.parts.append(
            f'<circle cx="{x}" cy="{y}" r="3.5" fill="{color}"/>'
        )

    def text(self, p, s, color="#333"):
        x, y = self.pt(p).split(",")
        self.parts.append(
            f'<text x="{x}" y="{y}" font-size="13" fill="{color}">{s}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}"'
            f' height="{self.height}" viewBox="0 0 {self.width}'
            f' {self.height}">\n<rect width="100%" height="100%"'
            f' fill="white"/>\n{body}\n</svg>\n'
        )


def _config_bounds(config: Configuration, pad=Fraction(1)):
    xs, ys = [], []
    for c in config.curves:
        for q, p in c.points:
            xs.append(q)
            ys.append(p)
    for x in config.intersections():
        xs.append(x.point[0])
        ys.append(x.point[1])
    lo = (min(xs) - pad, min(ys) - pad)
    hi = (max(xs) + pad, max(ys) + pad)
    return lo, hi


def render_configuration(config: Configuration, polygons=(), region=None,
                         show_crossings=True) -> str:
    canvas = SvgCanvas(_config_bounds(config))
    if region is not None:
        for fid in region.faces:
            pts = _face_polygon(region.arrangement, fid)
            if pts:
                canvas.polygon(pts, "#ffe680", opacity=0.6)
    for poly in polygons:
        canvas.polygon(poly.loop[:-1], "#ffd24d", opacity=0.75)
    clip = Fraction(3)
    for i, c in enumerate(config.curves):
        color = PALETTE[i % len(PALETTE)]
        pts = c.clipped_chain(clip)
        canvas.polyline(pts, color)
        canvas.text(c.points[0], c.label(), color)
    if show_crossings:
        for x in config.intersections():
            canvas.dot(x.point)
    return canvas.render()


def _face_polygon(arr, fid):
    cycle = arr.faces[fid]
    pts = []
    for (idx, sgn) in cycle:
        p, q = arr.edges[idx]
        pts.append(p if sgn > 0 else q)
    return pts
