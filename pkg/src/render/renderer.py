"""
Vector scene -> raster tile under a stylesheet

Drawing runs in four phases, each following the sheet's draw order: polygon
fills (and outlines), line casings, line strokes, point markers. Each class is
composited once per phase as the union of its features.
"""

import numpy as np
from loguru import logger

from src.city.clipping import clip_to_bounds
from src.city.features import Coord, FeatureClass, VectorFeature, VectorScene
from src.render.raster import (
    PixelCoord,
    RasterTile,
    composite,
    marker_mask,
    polygon_mask,
    stroke_mask,
)
from src.render.styles import StyleSheet
from src.render.typify import typify_pois
from src.tiles.geometry import (
    ORIGIN_SHIFT,
    GeoBounds,
    MercatorPoint,
    TileCoord,
    tile_bounds,
    tile_size_meters,
)

EDGE_PADDING_PX = 2.0


class _PixelMapper:
    """Linear map of a Mercator window onto a width x height pixel grid"""

    def __init__(self, bounds: GeoBounds, width: int, height: int):
        self.minx = bounds.min.x
        self.maxy = bounds.max.y
        self.sx = width / bounds.width
        self.sy = height / bounds.height

    def __call__(self, coords) -> list[PixelCoord]:
        return [((x - self.minx) * self.sx, (self.maxy - y) * self.sy) for x, y in coords]


def render_margin_px(sheet: StyleSheet) -> float:
    return sheet.max_extent_px() + EDGE_PADDING_PX


def typified_markers(
    scene: VectorScene, cls: FeatureClass, z: int, sheet: StyleSheet, tile_px: int
) -> list[Coord]:
    """Mercator marker positions for every point of cls in the whole scene

    Clustering runs once per scene, zoom and tile pixel size, in the global
    pixel frame of that zoom, so every tile and window agrees on each marker.
    """
    rule = sheet.typify
    scale = tile_px / tile_size_meters(z)

    def build() -> list[Coord]:
        points = [
            (f.id, ((x + ORIGIN_SHIFT) * scale, (ORIGIN_SHIFT - y) * scale))
            for f in scene.of_class(cls)
            if f.geometry.kind == "point"
            for x, y in f.geometry.coords[:1]
        ]
        positions = typify_pois(points, rule.cluster_radius, rule.min_cluster_size)
        return [(gx / scale - ORIGIN_SHIFT, ORIGIN_SHIFT - gy / scale) for gx, gy in positions]

    key = ("markers", cls, z, tile_px, rule.cluster_radius, rule.min_cluster_size)
    return scene.memoized(key, build)


def render_bounds(
    scene: VectorScene,
    bounds: GeoBounds,
    z: int,
    sheet: StyleSheet,
    width: int,
    height: int,
) -> np.ndarray:
    """Render an arbitrary Mercator window with zoom-z styling; returns HxWx3 uint8"""
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = sheet.background.rgb

    meters_per_px = bounds.width / width
    window = bounds.expand(render_margin_px(sheet) * meters_per_px)
    clipped = clip_to_bounds(scene, window)
    to_px = _PixelMapper(bounds, width, height)

    visible = sheet.visible_classes(z)
    by_class: dict[FeatureClass, list[VectorFeature]] = {c: [] for c in FeatureClass}
    for f in clipped.features:
        if f.feature_class in visible:
            by_class[f.feature_class].append(f)
    order = [c for c in sheet.draw_order if by_class[c]]

    # polygons
    for cls in order:
        style = sheet.style(cls)
        rings = [to_px(f.geometry.coords) for f in by_class[cls] if f.geometry.kind == "polygon"]
        if not rings:
            continue
        if style.fill is not None:
            mask = np.zeros((height, width), dtype=bool)
            for ring in rings:
                mask |= polygon_mask(img.shape, ring)
            composite(img, mask, style.fill)
        outline = style.width_at(z)
        if style.stroke is not None and outline > 0:
            mask = np.zeros((height, width), dtype=bool)
            for ring in rings:
                mask |= stroke_mask(img.shape, ring + ring[:1], outline)
            composite(img, mask, style.stroke)

    lines = {
        cls: [to_px(f.geometry.coords) for f in by_class[cls] if f.geometry.kind == "polyline"]
        for cls in order
    }

    # casings
    for cls in order:
        style = sheet.style(cls)
        if not lines[cls] or style.casing is None or style.casing_width <= 0:
            continue
        w = style.width_at(z) + 2 * style.casing_width
        mask = np.zeros((height, width), dtype=bool)
        for pts in lines[cls]:
            mask |= stroke_mask(img.shape, pts, w)
        composite(img, mask, style.casing)

    # strokes
    for cls in order:
        style = sheet.style(cls)
        w = style.width_at(z)
        if not lines[cls] or style.stroke is None or w <= 0:
            continue
        mask = np.zeros((height, width), dtype=bool)
        for pts in lines[cls]:
            mask |= stroke_mask(img.shape, pts, w)
        composite(img, mask, style.stroke)

    # markers
    for cls in sheet.draw_order:
        if cls not in visible or sheet.style(cls).marker is None:
            continue
        style = sheet.style(cls)
        if sheet.typify.enabled:
            tile_px = round(width * tile_size_meters(z) / bounds.width)
            positions = [
                to_px([m])[0]
                for m in typified_markers(scene, cls, z, sheet, tile_px)
                if window.contains(MercatorPoint(*m))
            ]
        else:
            positions = [
                to_px(f.geometry.coords)[0] for f in by_class[cls] if f.geometry.kind == "point"
            ]
        if not positions:
            continue
        mask = np.zeros((height, width), dtype=bool)
        for p in positions:
            mask |= marker_mask(img.shape, p, style.marker)
        composite(img, mask, style.marker.color)

    return img


def render_tile(scene: VectorScene, t: TileCoord, sheet: StyleSheet, size: int = 64) -> RasterTile:
    """Deterministic rendering of tile t at size x size pixels"""
    pixels = render_bounds(scene, tile_bounds(t), t.z, sheet, size, size)
    logger.debug(f"Rendered {t} with {sheet.id} at {size}px")
    return RasterTile(pixels)
