"""User stroke geometry and round-brush rasterization.

Strokes arrive as polylines in pixel coordinates (x right, y down),
tagged by mouse button: primary-button strokes add scribble geometry,
secondary-button strokes mark areas to erase. A pixel (row, col) is
covered when the point (col, row) lies within brush radius of the
polyline (inclusive), so a single-point stroke stamps a disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Stroke:
    points: tuple[tuple[float, float], ...]
    radius: float = 4.0

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if not pts:
            raise ValueError("stroke needs at least one point")
        if self.radius <= 0:
            raise ValueError(f"brush radius must be positive, got {self.radius}")
        object.__setattr__(self, "points", pts)

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points], "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "Stroke":
        return cls(
            points=tuple((p[0], p[1]) for p in data["points"]),
            radius=float(data.get("radius", 4.0)),
        )


@dataclass(frozen=True)
class StrokeSet:
    add_strokes: tuple[Stroke, ...] = ()
    remove_strokes: tuple[Stroke, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "add_strokes", tuple(self.add_strokes))
        object.__setattr__(self, "remove_strokes", tuple(self.remove_strokes))

    @property
    def empty(self) -> bool:
        return not self.add_strokes and not self.remove_strokes

    def to_dict(self) -> dict:
        return {
            "add_strokes": [s.to_dict() for s in self.add_strokes],
            "remove_strokes": [s.to_dict() for s in self.remove_strokes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StrokeSet":
        return cls(
            add_strokes=tuple(Stroke.from_dict(s) for s in data.get("add_strokes", [])),
            remove_strokes=tuple(Stroke.from_dict(s) for s in data.get("remove_strokes", [])),
        )


def _check_in_viewport(stroke: Stroke, width: int, height: int) -> None:
    for x, y in stroke.points:
        if not (0.0 <= x < width and 0.0 <= y < height):
            raise ValueError(f"stroke point ({x}, {y}) outside {width}x{height} viewport")


def _stamp_segment(mask: np.ndarray, p, q, radius: float) -> None:
    h, w = mask.shape
    px, py = p
    qx, qy = q
    x0 = max(0, math.floor(min(px, qx) - radius))
    x1 = min(w - 1, math.ceil(max(px, qx) + radius))
    y0 = max(0, math.floor(min(py, qy) - radius))
    y1 = min(h - 1, math.ceil(max(py, qy) + radius))
    if x0 > x1 or y0 > y1:
        return
    xs = np.arange(x0, x1 + 1, dtype=np.float64)
    ys = np.arange(y0, y1 + 1, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys)
    dx, dy = qx - px, qy - py
    seg_len_sq = dx * dx + dy * dy
    if seg_len_sq == 0.0:
        t = 0.0
    else:
        t = np.clip(((gx - px) * dx + (gy - py) * dy) / seg_len_sq, 0.0, 1.0)
    ex = gx - (px + t * dx)
    ey = gy - (py + t * dy)
    mask[y0 : y1 + 1, x0 : x1 + 1] |= ex * ex + ey * ey <= radius * radius


def rasterize_strokes(strokes, width: int, height: int) -> np.ndarray:
    """Union of round-brush sweeps for every polyline."""
    mask = np.zeros((height, width), dtype=bool)
    for stroke in strokes:
        _check_in_viewport(stroke, width, height)
        pts = stroke.points
        if len(pts) == 1:
            _stamp_segment(mask, pts[0], pts[0], stroke.radius)
        for p, q in zip(pts, pts[1:]):
            _stamp_segment(mask, p, q, stroke.radius)
    return mask


def aggregate_scribbles(auto_edges: np.ndarray, strokes: StrokeSet):
    """Merge detected edges with user strokes into the scribble condition.

    Primary-button strokes are ORed into the edge map; secondary-button
    strokes erase. Returns (scribble, cleared) where cleared is the erased
    region, which the caller also resets in the depth condition.
    """
    if auto_edges.dtype != np.bool_ or auto_edges.ndim != 2:
        raise ValueError("auto_edges must be a 2-D boolean mask")
    h, w = auto_edges.shape
    added = rasterize_strokes(strokes.add_strokes, w, h)
    cleared = rasterize_strokes(strokes.remove_strokes, w, h)
    scribble = (auto_edges | added) & ~cleared
    return scribble, cleared


def strokes_bounding_box(strokes, width: int, height: int):
    """Tight pixel box around the strokes, dilated by each brush radius.

    Returns (left, top, right, bottom) half-open, clamped to the viewport,
    or None when there are no strokes.
    """
    strokes = list(strokes)
    if not strokes:
        return None
    lo_x = lo_y = math.inf
    hi_x = hi_y = -math.inf
    for stroke in strokes:
        for x, y in stroke.points:
            lo_x = min(lo_x, x - stroke.radius)
            lo_y = min(lo_y, y - stroke.radius)
            hi_x = max(hi_x, x + stroke.radius)
            hi_y = max(hi_y, y + stroke.radius)
    # tight over pixels the brush can reach: column c is reachable when
    # lo_x <= c <= hi_x, so the half-open box is [ceil(lo_x), floor(hi_x)+1)
    left = max(0, math.ceil(lo_x))
    top = max(0, math.ceil(lo_y))
    right = min(width, math.floor(hi_x) + 1)
    bottom = min(height, math.floor(hi_y) + 1)
    if right <= left or bottom <= top:
        return None
    return (left, top, right, bottom)
