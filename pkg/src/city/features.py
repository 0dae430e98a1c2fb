"""
Vector feature model for synthetic city scenes
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Hashable, Optional, Union

import numpy as np

from src.core.exceptions import InvalidGeometryError
from src.tiles.geometry import GeoBounds

Coord = tuple[float, float]


class FeatureClass(str, Enum):
    """Closed set of map feature classes"""

    ROAD_PRIMARY = "RoadPrimary"
    ROAD_SECONDARY = "RoadSecondary"
    ROAD_RESIDENTIAL = "RoadResidential"
    BUILDING = "Building"
    WATER = "Water"
    GRASS = "Grass"
    POI = "Poi"

    @property
    def is_road(self) -> bool:
        return self in ROAD_CLASSES

    @property
    def kind(self) -> str:
        """Geometry kind every feature of this class must carry"""
        if self is FeatureClass.POI:
            return Point.kind
        if self.is_road:
            return Polyline.kind
        return Polygon.kind


ROAD_CLASSES = frozenset(
    {FeatureClass.ROAD_PRIMARY, FeatureClass.ROAD_SECONDARY, FeatureClass.ROAD_RESIDENTIAL}
)


def signed_area(coords: tuple[Coord, ...]) -> float:
    """Shoelace area; positive for counter-clockwise rings"""
    total = 0.0
    n = len(coords)
    for i in range(n):
        x0, y0 = coords[i]
        x1, y1 = coords[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total / 2.0


@dataclass(frozen=True)
class Point:
    coords: tuple[Coord, ...]
    kind = "point"

    def __post_init__(self):
        if len(self.coords) != 1:
            raise InvalidGeometryError(f"Point needs exactly 1 vertex, got {len(self.coords)}")

    @classmethod
    def at(cls, x: float, y: float) -> "Point":
        return cls(((x, y),))

    @property
    def xy(self) -> Coord:
        return self.coords[0]


@dataclass(frozen=True)
class Polyline:
    coords: tuple[Coord, ...]
    kind = "polyline"

    def __post_init__(self):
        if len(self.coords) < 2:
            raise InvalidGeometryError(f"Polyline needs >= 2 vertices, got {len(self.coords)}")


@dataclass(frozen=True)
class Polygon:
    """Implicitly closed ring, stored counter-clockwise"""

    coords: tuple[Coord, ...]
    kind = "polygon"

    def __post_init__(self):
        if len(self.coords) < 3:
            raise InvalidGeometryError(f"Polygon needs >= 3 vertices, got {len(self.coords)}")
        if signed_area(self.coords) < 0:
            object.__setattr__(self, "coords", tuple(reversed(self.coords)))


Geometry = Union[Point, Polyline, Polygon]
GEOMETRY_KINDS: dict[str, type] = {g.kind: g for g in (Point, Polyline, Polygon)}


@dataclass(frozen=True)
class VectorFeature:
    id: int
    feature_class: FeatureClass
    geometry: Geometry

    def __post_init__(self):
        if self.id < 0:
            raise InvalidGeometryError(f"Feature id must be non-negative, got {self.id}")
        if self.geometry.kind != self.feature_class.kind:
            raise InvalidGeometryError(
                f"Feature {self.id}: {self.feature_class.value} requires "
                f"{self.feature_class.kind}, got {self.geometry.kind}"
            )

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [c[0] for c in self.geometry.coords]
        ys = [c[1] for c in self.geometry.coords]
        return (min(xs), min(ys), max(xs), max(ys))


@dataclass(frozen=True)
class VectorScene:
    """Immutable set of features generated (or clipped) inside bounds.

    Ids are unique, except that the visible runs of one clipped polyline keep
    their source id.
    """

    bounds: GeoBounds
    seed: int
    features: tuple[VectorFeature, ...] = ()
    _index: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        seen: dict[int, VectorFeature] = {}
        for f in self.features:
            prev = seen.get(f.id)
            if prev is not None and not (
                f.geometry.kind == prev.geometry.kind == Polyline.kind
                and f.feature_class is prev.feature_class
            ):
                raise InvalidGeometryError(f"Duplicate feature id {f.id}")
            seen[f.id] = f

    def __len__(self) -> int:
        return len(self.features)

    def bbox_index(self) -> np.ndarray:
        """(n, 4) array of feature boxes (minx, miny, maxx, maxy), built once"""
        if self._index is None:
            if self.features:
                index = np.array([f.bbox() for f in self.features], dtype=np.float64)
            else:
                index = np.zeros((0, 4), dtype=np.float64)
            object.__setattr__(self, "_index", index)
        return self._index

    def memoized(self, key: Hashable, build: Callable[[], Any]) -> Any:
        """build() once per key for the lifetime of the scene"""
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    def count(self, feature_class: FeatureClass) -> int:
        return sum(1 for f in self.features if f.feature_class is feature_class)

    def of_class(self, feature_class: FeatureClass) -> list[VectorFeature]:
        return [f for f in self.features if f.feature_class is feature_class]
