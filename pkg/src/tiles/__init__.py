"""Web-Mercator tile pyramid math"""

from src.tiles.geometry import (
    EARTH_RADIUS,
    MAX_LATITUDE,
    MAX_ZOOM,
    ORIGIN_SHIFT,
    GeoBounds,
    GeoPoint,
    MercatorPoint,
    TileCoord,
    geo_to_mercator,
    geo_to_pixel,
    geo_to_tile,
    mercator_to_geo,
    mercator_to_pixel,
    mercator_to_tile,
    tile_bounds,
    tile_children,
    tile_edge,
    tile_parent,
    tile_size_meters,
    tiles_in_bounds,
)

__all__ = [
    "EARTH_RADIUS",
    "MAX_LATITUDE",
    "MAX_ZOOM",
    "ORIGIN_SHIFT",
    "GeoBounds",
    "GeoPoint",
    "MercatorPoint",
    "TileCoord",
    "geo_to_mercator",
    "geo_to_pixel",
    "geo_to_tile",
    "mercator_to_geo",
    "mercator_to_pixel",
    "mercator_to_tile",
    "tile_bounds",
    "tile_children",
    "tile_edge",
    "tile_parent",
    "tile_size_meters",
    "tiles_in_bounds",
]
