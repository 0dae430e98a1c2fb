"""Rasterization of vector scenes into styled tiles"""

from src.render.raster import (
    TILE_SIZES,
    RasterTile,
    array_to_tile,
    composite,
    draw_marker,
    draw_polyline,
    fill_polygon,
    read_image,
    read_tile,
    resize_tile,
    tile_to_array,
    write_tile,
)
from src.render.renderer import render_bounds, render_tile
from src.render.styles import (
    SIMPLE_SHEET_ID,
    TARGET_SHEET_ID,
    ClassStyle,
    Marker,
    Rgba,
    StyleSheet,
    TypifyRule,
    builtin_simple_sheet,
    builtin_target_sheet,
    load_sheet,
)
from src.render.typify import cluster_pois, typify_pois

__all__ = [
    # Raster
    "TILE_SIZES",
    "RasterTile",
    "array_to_tile",
    "composite",
    "draw_marker",
    "draw_polyline",
    "fill_polygon",
    "read_image",
    "read_tile",
    "resize_tile",
    "tile_to_array",
    "write_tile",
    # Rendering
    "render_bounds",
    "render_tile",
    # Styles
    "SIMPLE_SHEET_ID",
    "TARGET_SHEET_ID",
    "ClassStyle",
    "Marker",
    "Rgba",
    "StyleSheet",
    "TypifyRule",
    "builtin_simple_sheet",
    "builtin_target_sheet",
    "load_sheet",
    # Typify
    "cluster_pois",
    "typify_pois",
]
