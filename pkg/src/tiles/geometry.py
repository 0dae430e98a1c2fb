"""
Coordinate math for the Web-Mercator tile pyramid

Geographic (degrees) <-> Spherical Mercator (meters) <-> tile/pixel conversions
and pyramid navigation. All functions are pure and operate on frozen value types.
"""

import math
from dataclasses import dataclass
from typing import Iterator

from src.core.exceptions import DomainError, OutOfTileError, ZoomBoundsError

EARTH_RADIUS = 6378137.0
ORIGIN_SHIFT = math.pi * EARTH_RADIUS  # 20037508.342789244
MAX_LATITUDE = 85.05113
MAX_ZOOM = 20
EXTENT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class GeoPoint:
    """Geographic position in degrees"""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise DomainError(f"Non-finite coordinate: ({self.lat}, {self.lon})")
        if abs(self.lat) > MAX_LATITUDE:
            raise DomainError(f"Latitude {self.lat} outside ±{MAX_LATITUDE}")
        if not -180.0 <= self.lon <= 180.0:
            raise DomainError(f"Longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class MercatorPoint:
    """Spherical Mercator position in meters"""

    x: float
    y: float

    def __post_init__(self):
        limit = ORIGIN_SHIFT + EXTENT_TOLERANCE
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"Non-finite coordinate: ({self.x}, {self.y})")
        if abs(self.x) > limit or abs(self.y) > limit:
            raise DomainError(f"Point ({self.x}, {self.y}) outside the world extent")


@dataclass(frozen=True, order=True)
class TileCoord:
    """Slippy-map tile address; y grows southward"""

    z: int
    x: int
    y: int

    def __post_init__(self):
        if not 0 <= self.z <= MAX_ZOOM:
            raise ZoomBoundsError(f"Zoom {self.z} outside [0, {MAX_ZOOM}]")
        n = 1 << self.z
        if not (0 <= self.x < n and 0 <= self.y < n):
            raise DomainError(f"Tile index ({self.x}, {self.y}) outside [0, {n}) at z={self.z}")

    def __str__(self) -> str:
        return f"{self.z}/{self.x}/{self.y}"

    @classmethod
    def parse(cls, text: str) -> "TileCoord":
        """Parse the textual form "z/x/y" """
        parts = text.strip().strip("/").split("/")
        if len(parts) != 3:
            raise DomainError(f"Tile key must be z/x/y, got {text!r}")
        try:
            z, x, y = (int(p) for p in parts)
        except ValueError as e:
            raise DomainError(f"Tile key must be integers, got {text!r}") from e
        return cls(z, x, y)


@dataclass(frozen=True)
class GeoBounds:
    """Axis-aligned box in Mercator meters"""

    min: MercatorPoint
    max: MercatorPoint

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise DomainError(f"Inverted bounds: min={self.min}, max={self.max}")

    @classmethod
    def from_coords(cls, minx: float, miny: float, maxx: float, maxy: float) -> "GeoBounds":
        return cls(MercatorPoint(minx, miny), MercatorPoint(maxx, maxy))

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.min.x, self.min.y, self.max.x, self.max.y)

    def contains(self, p: MercatorPoint) -> bool:
        return self.min.x <= p.x <= self.max.x and self.min.y <= p.y <= self.max.y

    def intersects(self, other: "GeoBounds") -> bool:
        return not (
            other.min.x > self.max.x
            or other.max.x < self.min.x
            or other.min.y > self.max.y
            or other.max.y < self.min.y
        )

    def expand(self, margin: float) -> "GeoBounds":
        """Grow the box by margin meters on every side, clamped to the world extent"""
        return GeoBounds(
            _clamp_to_world(self.min.x - margin, self.min.y - margin),
            _clamp_to_world(self.max.x + margin, self.max.y + margin),
        )

    def union(self, other: "GeoBounds") -> "GeoBounds":
        return GeoBounds.from_coords(
            min(self.min.x, other.min.x),
            min(self.min.y, other.min.y),
            max(self.max.x, other.max.x),
            max(self.max.y, other.max.y),
        )


WORLD_BOUNDS = GeoBounds.from_coords(-ORIGIN_SHIFT, -ORIGIN_SHIFT, ORIGIN_SHIFT, ORIGIN_SHIFT)


def geo_to_mercator(p: GeoPoint) -> MercatorPoint:
    """Project degrees to Spherical Mercator meters"""
    x = EARTH_RADIUS * math.radians(p.lon)
    y = EARTH_RADIUS * math.log(math.tan(math.pi / 4 + math.radians(p.lat) / 2))
    # MAX_LATITUDE is rounded up from the square limit; keep y on the extent
    y = max(-ORIGIN_SHIFT, min(ORIGIN_SHIFT, y))
    return MercatorPoint(x, y)


def mercator_to_geo(p: MercatorPoint) -> GeoPoint:
    """Inverse projection; MercatorPoint already guarantees the extent"""
    lon = math.degrees(p.x / EARTH_RADIUS)
    lat = math.degrees(2 * math.atan(math.exp(p.y / EARTH_RADIUS)) - math.pi / 2)
    return GeoPoint(lat=lat, lon=max(-180.0, min(180.0, lon)))


def _check_zoom(z: int):
    if not 0 <= z <= MAX_ZOOM:
        raise ZoomBoundsError(f"Zoom {z} outside [0, {MAX_ZOOM}]")


def geo_to_tile(p: GeoPoint, z: int) -> TileCoord:
    """Tile containing p at zoom z (standard slippy scheme, floor semantics)"""
    _check_zoom(z)
    n = 1 << z
    lat_rad = math.radians(p.lat)
    fx = (p.lon + 180.0) / 360.0 * n
    fy = (1.0 - math.asinh(math.tan(lat_rad)) / math.pi) / 2.0 * n
    x = min(max(int(math.floor(fx)), 0), n - 1)
    y = min(max(int(math.floor(fy)), 0), n - 1)
    return TileCoord(z, x, y)


def mercator_to_tile(p: MercatorPoint, z: int) -> TileCoord:
    """Tile containing a Mercator point, computed directly in meters"""
    _check_zoom(z)
    n = 1 << z
    span = 2 * ORIGIN_SHIFT
    x = int(math.floor((p.x + ORIGIN_SHIFT) / span * n))
    y = int(math.floor((ORIGIN_SHIFT - p.y) / span * n))
    return TileCoord(z, min(max(x, 0), n - 1), min(max(y, 0), n - 1))


def tile_size_meters(z: int) -> float:
    """Edge length of any tile at zoom z"""
    _check_zoom(z)
    return 2 * ORIGIN_SHIFT / (1 << z)


def tile_edge(i: int, z: int) -> float:
    """Mercator x of the i-th vertical tile edge at zoom z.

    Edges are computed from the index, never accumulated, so the east edge of
    tile i and the west edge of tile i+1 are the same float, and a parent's
    edges coincide with its children's.
    """
    return -ORIGIN_SHIFT + i * tile_size_meters(z)


def tile_bounds(t: TileCoord) -> GeoBounds:
    """Mercator box covered by a tile"""
    size = tile_size_meters(t.z)
    minx = -ORIGIN_SHIFT + t.x * size
    maxx = -ORIGIN_SHIFT + (t.x + 1) * size
    maxy = ORIGIN_SHIFT - t.y * size
    miny = ORIGIN_SHIFT - (t.y + 1) * size
    return GeoBounds.from_coords(minx, miny, maxx, maxy)


def tile_children(t: TileCoord) -> list[TileCoord]:
    """The four tiles one level down, row-major (NW, NE, SW, SE)"""
    if t.z >= MAX_ZOOM:
        raise ZoomBoundsError(f"Tile {t} at max zoom has no children")
    return [
        TileCoord(t.z + 1, 2 * t.x + dx, 2 * t.y + dy) for dy in (0, 1) for dx in (0, 1)
    ]


def tile_parent(t: TileCoord) -> TileCoord:
    if t.z <= 0:
        raise ZoomBoundsError("Root tile has no parent")
    return TileCoord(t.z - 1, t.x // 2, t.y // 2)


def mercator_to_pixel(p: MercatorPoint, t: TileCoord, tile_size: int) -> tuple[float, float]:
    """Fractional pixel position of p relative to tile t (no range check)"""
    return _to_pixel(p.x, p.y, tile_bounds(t), tile_size)


def _to_pixel(x: float, y: float, b: GeoBounds, tile_size: int) -> tuple[float, float]:
    px = (x - b.min.x) / b.width * tile_size
    py = (b.max.y - y) / b.height * tile_size
    return px, py


def geo_to_pixel(p: GeoPoint, t: TileCoord, tile_size: int) -> tuple[float, float]:
    """Fractional pixel position of a geographic point inside tile t; y grows downward"""
    m = geo_to_mercator(p)
    b = tile_bounds(t)
    tol = b.width * 1e-9
    if not (
        b.min.x - tol <= m.x <= b.max.x + tol and b.min.y - tol <= m.y <= b.max.y + tol
    ):
        raise OutOfTileError(f"Point ({p.lat}, {p.lon}) is outside tile {t}")
    return _to_pixel(m.x, m.y, b, tile_size)


def tiles_in_bounds(bounds: GeoBounds, z: int) -> Iterator[TileCoord]:
    """Tiles at zoom z intersecting a Mercator box, row-major"""
    lo = mercator_to_tile(_clamp_to_world(bounds.min.x, bounds.max.y), z)
    hi = mercator_to_tile(_clamp_to_world(bounds.max.x, bounds.min.y), z)
    for y in range(lo.y, hi.y + 1):
        for x in range(lo.x, hi.x + 1):
            yield TileCoord(z, x, y)


def _clamp_to_world(x: float, y: float) -> MercatorPoint:
    return MercatorPoint(
        max(-ORIGIN_SHIFT, min(ORIGIN_SHIFT, x)), max(-ORIGIN_SHIFT, min(ORIGIN_SHIFT, y))
    )
