"""
Procedural city generator

Builds a jittered street grid, fills blocks with parks, water or building lots,
and scatters POIs near buildings. The result is a pure function of
(seed, bounds, params).
"""

import math

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.city.features import (
    Coord,
    FeatureClass,
    Point,
    Polygon,
    Polyline,
    VectorFeature,
    VectorScene,
)
from src.city.rng import SplitMix64
from src.core.exceptions import DegenerateBoundsError
from src.tiles.geometry import GeoBounds

ROAD_SETBACK = 0.08  # of block size
LOTS_PER_BLOCK_SIDE = 4
BUILDING_INSET = 0.10  # of lot size
POI_SCATTER = 0.10  # of lot size
WATER_CHAMFER = 0.25  # of the shorter block side

# split() keys for the independent per-item streams
_NODE, _BLOCK, _POI = 0, 1, 2


class CityParams(BaseModel):
    """Knobs of the procedural city"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    block_size: float = Field(default=120.0, gt=0, description="Grid spacing in meters")
    road_jitter: float = Field(
        default=0.15, ge=0, le=1, description="Node jitter, fraction of block"
    )
    building_density: float = Field(default=0.7, ge=0, le=1)
    park_probability: float = Field(default=0.08, ge=0, le=1)
    water_probability: float = Field(default=0.04, ge=0, le=1)
    poi_density: float = Field(default=0.15, ge=0, le=1, description="POIs per building")


def quantize(v: float) -> float:
    """Millimeter precision used by the scene text format"""
    return round(v, 3)


def _q(coords: list[Coord]) -> tuple[Coord, ...]:
    return tuple((quantize(x), quantize(y)) for x, y in coords)


def road_class(index: int) -> FeatureClass:
    """Road hierarchy by grid-line index"""
    if index % 4 == 0:
        return FeatureClass.ROAD_PRIMARY
    if index % 2 == 0:
        return FeatureClass.ROAD_SECONDARY
    return FeatureClass.ROAD_RESIDENTIAL


def rect(x0: float, y0: float, x1: float, y1: float) -> list[Coord]:
    """Counter-clockwise axis-aligned rectangle"""
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def chamfered(x0: float, y0: float, x1: float, y1: float) -> list[Coord]:
    c = WATER_CHAMFER * min(x1 - x0, y1 - y0)
    return [
        (x0 + c, y0),
        (x1 - c, y0),
        (x1, y0 + c),
        (x1, y1 - c),
        (x1 - c, y1),
        (x0 + c, y1),
        (x0, y1 - c),
        (x0, y0 + c),
    ]


class CityGenerator:
    """Generates one VectorScene from a seed, a Mercator extent and CityParams"""

    def __init__(self, seed: int, bounds: GeoBounds, params: CityParams):
        minx, miny, maxx, maxy = (quantize(v) for v in bounds.as_tuple())
        self.bounds = GeoBounds.from_coords(minx, miny, maxx, maxy)
        self.seed = seed
        self.params = params
        self.rng = SplitMix64(seed)

        block = params.block_size
        if self.bounds.width < block or self.bounds.height < block:
            raise DegenerateBoundsError(
                f"Bounds {self.bounds.width:.1f}x{self.bounds.height:.1f} m smaller than "
                f"one {block} m block"
            )
        self.cols = max(1, round(self.bounds.width / block))
        self.rows = max(1, round(self.bounds.height / block))
        self.nodes = self._grid_nodes()

    def _grid_nodes(self) -> list[list[Coord]]:
        """nodes[i][j] for vertical line i and horizontal line j"""
        b = self.bounds
        sx = b.width / self.cols
        sy = b.height / self.rows
        amp = self.params.road_jitter
        nodes = []
        for i in range(self.cols + 1):
            column = []
            for j in range(self.rows + 1):
                node_rng = self.rng.split(_NODE, i, j)
                jx = (node_rng.uniform() - 0.5) * amp * sx
                jy = (node_rng.uniform() - 0.5) * amp * sy
                if i == 0:
                    x = b.min.x
                elif i == self.cols:
                    x = b.max.x
                else:
                    x = b.min.x + i * sx + jx
                if j == 0:
                    y = b.min.y
                elif j == self.rows:
                    y = b.max.y
                else:
                    y = b.min.y + j * sy + jy
                column.append((x, y))
            nodes.append(column)
        return nodes

    def _roads(self) -> list[tuple[FeatureClass, Polyline]]:
        roads = []
        for i in range(self.cols + 1):
            line = [self.nodes[i][j] for j in range(self.rows + 1)]
            roads.append((road_class(i), Polyline(_q(line))))
        for j in range(self.rows + 1):
            line = [self.nodes[i][j] for i in range(self.cols + 1)]
            roads.append((road_class(j), Polyline(_q(line))))
        return roads

    def _block_interior(self, i: int, j: int):
        """Axis-aligned rectangle inside the block, set back from the streets"""
        n = self.nodes
        setback = ROAD_SETBACK * self.params.block_size
        x0 = max(n[i][j][0], n[i][j + 1][0]) + setback
        x1 = min(n[i + 1][j][0], n[i + 1][j + 1][0]) - setback
        y0 = max(n[i][j][1], n[i + 1][j][1]) + setback
        y1 = min(n[i][j + 1][1], n[i + 1][j + 1][1]) - setback
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            return None
        return x0, y0, x1, y1

    def generate(self) -> VectorScene:
        p = self.params
        lot = p.block_size / LOTS_PER_BLOCK_SIDE
        areas: list[tuple[FeatureClass, Polygon]] = []
        buildings: list[Polygon] = []
        pois: list[Point] = []

        for j in range(self.rows):
            for i in range(self.cols):
                interior = self._block_interior(i, j)
                if interior is None:
                    continue
                block_rng = self.rng.split(_BLOCK, i, j)
                if block_rng.chance(p.water_probability):
                    areas.append((FeatureClass.WATER, Polygon(_q(chamfered(*interior)))))
                    continue
                if block_rng.chance(p.park_probability):
                    areas.append((FeatureClass.GRASS, Polygon(_q(rect(*interior)))))
                    continue

                x0, y0, x1, y1 = interior
                lot_cols = max(1, math.floor((x1 - x0) / lot))
                lot_rows = max(1, math.floor((y1 - y0) / lot))
                lot_w = (x1 - x0) / lot_cols
                lot_h = (y1 - y0) / lot_rows
                inset = BUILDING_INSET * min(lot_w, lot_h)
                poi_rng = self.rng.split(_POI, i, j)
                for r in range(lot_rows):
                    for c in range(lot_cols):
                        if not block_rng.chance(p.building_density):
                            continue
                        bx0 = x0 + c * lot_w + inset
                        by0 = y0 + r * lot_h + inset
                        bx1 = x0 + (c + 1) * lot_w - inset
                        by1 = y0 + (r + 1) * lot_h - inset
                        buildings.append(Polygon(_q(rect(bx0, by0, bx1, by1))))
                        if poi_rng.chance(p.poi_density):
                            dx = poi_rng.uniform(-POI_SCATTER, POI_SCATTER) * lot_w
                            dy = poi_rng.uniform(-POI_SCATTER, POI_SCATTER) * lot_h
                            cx, cy = (bx0 + bx1) / 2 + dx, (by0 + by1) / 2 + dy
                            pois.append(Point(_q([(cx, cy)])))

        features: list[VectorFeature] = []
        for cls, geom in self._roads():
            features.append(VectorFeature(len(features), cls, geom))
        for cls, poly in areas:
            features.append(VectorFeature(len(features), cls, poly))
        for poly in buildings:
            features.append(VectorFeature(len(features), FeatureClass.BUILDING, poly))
        for pt in pois:
            features.append(VectorFeature(len(features), FeatureClass.POI, pt))

        scene = VectorScene(bounds=self.bounds, seed=self.seed, features=tuple(features))
        logger.info(
            f"Generated city seed={self.seed} grid={self.cols}x{self.rows}: "
            f"{len(features)} features ({len(buildings)} buildings, {len(pois)} POIs)"
        )
        return scene


def generate_city(seed: int, bounds: GeoBounds, params: CityParams) -> VectorScene:
    """Deterministic procedural scene covering bounds"""
    return CityGenerator(seed, bounds, params).generate()
