"""Procedural vector scenes: features, generator, clipping and text format"""

from src.city.clipping import clip_scene, clip_to_bounds
from src.city.features import (
    FeatureClass,
    Point,
    Polygon,
    Polyline,
    VectorFeature,
    VectorScene,
)
from src.city.generator import CityParams, generate_city
from src.city.rng import SplitMix64
from src.city.scene_format import parse_scene, read_scene, serialize_scene, write_scene

__all__ = [
    # Features
    "FeatureClass",
    "Point",
    "Polygon",
    "Polyline",
    "VectorFeature",
    "VectorScene",
    # Generation
    "CityParams",
    "SplitMix64",
    "generate_city",
    # Clipping
    "clip_scene",
    "clip_to_bounds",
    # Text format
    "parse_scene",
    "read_scene",
    "serialize_scene",
    "write_scene",
]
