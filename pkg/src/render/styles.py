"""
Stylesheets for the simple and target renderings
"""

import json
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.city.features import FeatureClass
from src.core.exceptions import InvalidStyleSheetError

SIMPLE_SHEET_ID = "simple-v1"
TARGET_SHEET_ID = "target-v1"


class Rgba(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    r: int = Field(ge=0, le=255)
    g: int = Field(ge=0, le=255)
    b: int = Field(ge=0, le=255)
    a: int = Field(default=255, ge=0, le=255)

    @property
    def rgb(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


def rgba(r: int, g: int, b: int, a: int = 255) -> Rgba:
    return Rgba(r=r, g=g, b=b, a=a)


class Marker(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    shape: Literal["circle", "pin"] = "circle"
    radius: float = Field(default=2.0, gt=0)
    color: Rgba


class ClassStyle(BaseModel):
    """How one feature class is drawn"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fill: Optional[Rgba] = None
    stroke: Optional[Rgba] = None
    stroke_width: dict[int, float] = Field(default_factory=dict, description="zoom -> px")
    casing: Optional[Rgba] = None
    casing_width: float = Field(default=0.0, ge=0)
    min_zoom: int = Field(default=0, ge=0, le=20)
    marker: Optional[Marker] = None

    @field_validator("stroke_width")
    @classmethod
    def _check_widths(cls, v: dict[int, float]) -> dict[int, float]:
        for zoom, width in v.items():
            if not 0 <= zoom <= 20:
                raise ValueError(f"zoom {zoom} outside [0, 20]")
            if width < 0:
                raise ValueError(f"negative width {width} at zoom {zoom}")
        return v

    def width_at(self, z: int) -> float:
        """Width for zoom z: the nearest lower zoom in the table, else the lowest entry"""
        if not self.stroke_width:
            return 0.0
        zooms = sorted(self.stroke_width)
        lower = [k for k in zooms if k <= z]
        return self.stroke_width[lower[-1] if lower else zooms[0]]

    def max_width(self) -> float:
        return max(self.stroke_width.values(), default=0.0)


class TypifyRule(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    enabled: bool = False
    cluster_radius: float = Field(default=12.0, ge=0, description="px")
    min_cluster_size: int = Field(default=2, ge=1)


class StyleSheet(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    background: Rgba
    classes: dict[FeatureClass, ClassStyle]
    draw_order: list[FeatureClass]
    typify: TypifyRule = TypifyRule()

    @model_validator(mode="after")
    def _check_complete(self) -> "StyleSheet":
        order = self.draw_order
        if len(order) != len(FeatureClass) or set(order) != set(FeatureClass):
            raise ValueError("draw_order must list every feature class exactly once")
        missing = set(FeatureClass) - set(self.classes)
        if missing:
            raise ValueError(f"missing class styles: {sorted(m.value for m in missing)}")
        return self

    def style(self, feature_class: FeatureClass) -> ClassStyle:
        return self.classes[feature_class]

    def visible_classes(self, z: int) -> set[FeatureClass]:
        return {c for c, s in self.classes.items() if z >= s.min_zoom}

    def max_extent_px(self) -> float:
        """Largest distance a stroke, casing or marker reaches from its geometry"""
        extent = 0.0
        for s in self.classes.values():
            extent = max(extent, s.max_width() / 2 + s.casing_width)
            if s.marker is not None:
                reach = s.marker.radius * (3 if s.marker.shape == "pin" else 1)
                extent = max(extent, reach)
        return extent

    def palette(self) -> set[tuple[int, int, int, int]]:
        colors = {tuple(self.background.model_dump().values())}
        for s in self.classes.values():
            for c in (s.fill, s.stroke, s.casing, s.marker.color if s.marker else None):
                if c is not None:
                    colors.add((c.r, c.g, c.b, c.a))
        return colors


DEFAULT_DRAW_ORDER = [
    FeatureClass.WATER,
    FeatureClass.GRASS,
    FeatureClass.BUILDING,
    FeatureClass.ROAD_RESIDENTIAL,
    FeatureClass.ROAD_SECONDARY,
    FeatureClass.ROAD_PRIMARY,
    FeatureClass.POI,
]


def builtin_simple_sheet() -> StyleSheet:
    """Saturated hue per class, subtle transparency, 1px strokes, no generalization"""
    alpha = 230

    def area(r: int, g: int, b: int) -> ClassStyle:
        color = rgba(r, g, b, alpha)
        return ClassStyle(fill=color, stroke=color, stroke_width={0: 1})

    def road(r: int, g: int, b: int) -> ClassStyle:
        return ClassStyle(stroke=rgba(r, g, b, alpha), stroke_width={0: 1})

    return StyleSheet(
        id=SIMPLE_SHEET_ID,
        background=rgba(255, 255, 255),
        classes={
            FeatureClass.ROAD_PRIMARY: road(230, 25, 75),
            FeatureClass.ROAD_SECONDARY: road(245, 130, 48),
            FeatureClass.ROAD_RESIDENTIAL: road(255, 225, 25),
            FeatureClass.BUILDING: area(145, 30, 180),
            FeatureClass.WATER: area(0, 130, 200),
            FeatureClass.GRASS: area(60, 180, 75),
            FeatureClass.POI: ClassStyle(
                marker=Marker(shape="circle", radius=2, color=rgba(240, 50, 230, alpha))
            ),
        },
        draw_order=DEFAULT_DRAW_ORDER,
    )


def builtin_target_sheet() -> StyleSheet:
    """Pale, flat web-map look with zoom-dependent generalization.

    Road widths grow with rank and zoom, residential streets and buildings are
    selected out below z16, and nearby POIs collapse into one pin.
    """
    return StyleSheet(
        id=TARGET_SHEET_ID,
        background=rgba(245, 243, 240),
        classes={
            FeatureClass.ROAD_PRIMARY: ClassStyle(
                stroke=rgba(255, 255, 255),
                stroke_width={15: 3, 16: 4, 17: 6, 18: 8},
                casing=rgba(190, 190, 190),
                casing_width=1,
            ),
            FeatureClass.ROAD_SECONDARY: ClassStyle(
                stroke=rgba(254, 254, 254),
                stroke_width={15: 2, 16: 3, 17: 4, 18: 6},
                casing=rgba(200, 200, 200),
                casing_width=1,
            ),
            FeatureClass.ROAD_RESIDENTIAL: ClassStyle(
                stroke=rgba(253, 253, 253),
                stroke_width={15: 1, 16: 2, 17: 3, 18: 4},
                casing=rgba(210, 210, 210),
                casing_width=1,
                min_zoom=16,
            ),
            FeatureClass.BUILDING: ClassStyle(fill=rgba(224, 224, 224), min_zoom=16),
            FeatureClass.WATER: ClassStyle(fill=rgba(170, 211, 223)),
            FeatureClass.GRASS: ClassStyle(fill=rgba(200, 230, 180)),
            FeatureClass.POI: ClassStyle(
                marker=Marker(shape="pin", radius=3, color=rgba(234, 67, 53))
            ),
        },
        draw_order=DEFAULT_DRAW_ORDER,
        typify=TypifyRule(enabled=True, cluster_radius=12, min_cluster_size=2),
    )


BUILTIN_SHEETS = {
    SIMPLE_SHEET_ID: builtin_simple_sheet,
    TARGET_SHEET_ID: builtin_target_sheet,
}


def load_sheet(id_or_path: Union[str, Path]) -> StyleSheet:
    """Built-in sheet by id, or a StyleSheet JSON document"""
    factory = BUILTIN_SHEETS.get(str(id_or_path))
    if factory is not None:
        return factory()
    path = Path(id_or_path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return StyleSheet.model_validate(data)
    except FileNotFoundError:
        raise InvalidStyleSheetError(f"Unknown stylesheet {str(id_or_path)!r}") from None
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidStyleSheetError(f"Invalid stylesheet {path}: {e}") from e
