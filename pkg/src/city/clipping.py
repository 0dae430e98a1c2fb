"""
Cut a scene down to one tile window

Polygons are clipped with Sutherland-Hodgman, polylines with Liang-Barsky.
Degenerate results are dropped.
"""

import math
from typing import Optional

import numpy as np

from src.city.features import (
    Coord,
    Point,
    Polygon,
    Polyline,
    VectorFeature,
    VectorScene,
    signed_area,
)
from src.city.generator import quantize
from src.tiles.geometry import ORIGIN_SHIFT, GeoBounds, TileCoord, tile_bounds

Window = tuple[float, float, float, float]

MIN_POLYGON_AREA = 1e-6  # m²


def _inside_window(b: Window, x: float, y: float) -> bool:
    return b[0] <= x <= b[2] and b[1] <= y <= b[3]


def _bbox_within(bbox: tuple[float, float, float, float], w: Window) -> bool:
    return bbox[0] >= w[0] and bbox[1] >= w[1] and bbox[2] <= w[2] and bbox[3] <= w[3]


def clip_polygon(ring: tuple[Coord, ...], window: Window) -> list[Coord]:
    """Sutherland-Hodgman against the four window edges"""
    minx, miny, maxx, maxy = window
    # (inside test, intersection with the edge line)
    edges = [
        (lambda p: p[0] >= minx, lambda a, b: _at_x(a, b, minx)),
        (lambda p: p[0] <= maxx, lambda a, b: _at_x(a, b, maxx)),
        (lambda p: p[1] >= miny, lambda a, b: _at_y(a, b, miny)),
        (lambda p: p[1] <= maxy, lambda a, b: _at_y(a, b, maxy)),
    ]
    output = list(ring)
    for inside, intersect in edges:
        if not output:
            break
        points, output = output, []
        prev = points[-1]
        for cur in points:
            if inside(cur):
                if not inside(prev):
                    output.append(intersect(prev, cur))
                output.append(cur)
            elif inside(prev):
                output.append(intersect(prev, cur))
            prev = cur
    return output


def _at_x(a: Coord, b: Coord, x: float) -> Coord:
    t = (x - a[0]) / (b[0] - a[0])
    return (x, a[1] + t * (b[1] - a[1]))


def _at_y(a: Coord, b: Coord, y: float) -> Coord:
    t = (y - a[1]) / (b[1] - a[1])
    return (a[0] + t * (b[0] - a[0]), y)


def clip_segment(a: Coord, b: Coord, window: Window) -> Optional[tuple[Coord, Coord]]:
    """Liang-Barsky; None when the segment misses the window"""
    minx, miny, maxx, maxy = window
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, a[0] - minx), (dx, maxx - a[0]), (-dy, a[1] - miny), (dy, maxy - a[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    start = a if t0 == 0.0 else (a[0] + t0 * dx, a[1] + t0 * dy)
    end = b if t1 == 1.0 else (a[0] + t1 * dx, a[1] + t1 * dy)
    return start, end


def clip_polyline(coords: tuple[Coord, ...], window: Window) -> list[list[Coord]]:
    """Visible runs of a polyline, in order"""
    runs: list[list[Coord]] = []
    current: list[Coord] = []
    for a, b in zip(coords, coords[1:]):
        seg = clip_segment(a, b, window)
        if seg is None:
            if current:
                runs.append(current)
                current = []
            continue
        start, end = seg
        if current and current[-1] == start:
            current.append(end)
        else:
            if current:
                runs.append(current)
            current = [start, end]
        if end != b:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _dedupe(coords: list[Coord], closed: bool) -> list[Coord]:
    out: list[Coord] = []
    for c in coords:
        if not out or out[-1] != c:
            out.append(c)
    if closed and len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _quantized(coords: list[Coord]) -> list[Coord]:
    return [(quantize(x), quantize(y)) for x, y in coords]


def _clip_feature(f: VectorFeature, window: Window) -> list[VectorFeature]:
    g = f.geometry
    if isinstance(g, Point):
        return [f] if _inside_window(window, *g.xy) else []
    if _bbox_within(f.bbox(), window):
        return [f]
    if isinstance(g, Polygon):
        ring = _dedupe(_quantized(clip_polygon(g.coords, window)), closed=True)
        if len(ring) < 3 or abs(signed_area(tuple(ring))) < MIN_POLYGON_AREA:
            return []
        return [VectorFeature(f.id, f.feature_class, Polygon(tuple(ring)))]
    clipped = []
    for run in clip_polyline(g.coords, window):
        line = _dedupe(_quantized(run), closed=False)
        if len(line) >= 2:
            clipped.append(VectorFeature(f.id, f.feature_class, Polyline(tuple(line))))
    return clipped


def _outward_bounds(w: Window) -> GeoBounds:
    """Window rounded outward to the text format's precision"""

    def lo(v: float) -> float:
        return max(-ORIGIN_SHIFT, math.floor(v * 1000) / 1000)

    def hi(v: float) -> float:
        return min(ORIGIN_SHIFT, math.ceil(v * 1000) / 1000)

    return GeoBounds.from_coords(lo(w[0]), lo(w[1]), hi(w[2]), hi(w[3]))


def clip_to_bounds(scene: VectorScene, bounds: GeoBounds) -> VectorScene:
    """Features of scene intersecting bounds, clipped to it; ids preserved"""
    window = bounds.as_tuple()
    index = scene.bbox_index()
    features: list[VectorFeature] = []
    if len(index):
        hit = ~(
            (index[:, 0] > window[2])
            | (index[:, 2] < window[0])
            | (index[:, 1] > window[3])
            | (index[:, 3] < window[1])
        )
        for i in np.flatnonzero(hit):
            features.extend(_clip_feature(scene.features[i], window))
    return VectorScene(bounds=_outward_bounds(window), seed=scene.seed, features=tuple(features))


def clip_scene(scene: VectorScene, t: TileCoord, margin: float) -> VectorScene:
    """Features intersecting tile t's bounds grown by margin meters"""
    return clip_to_bounds(scene, tile_bounds(t).expand(margin))
