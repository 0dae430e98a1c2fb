"""
Experiment configuration document

One JSON file drives every command. Unknown keys are errors and the document
carries a version number.
"""

import json
from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.city.generator import CityParams
from src.core.exceptions import ConfigError
from src.gan.checkpoint import config_hash
from src.gan.trainer import MODEL_KINDS, TrainConfig
from src.ismap.classifier import IsMapConfig
from src.render.raster import TILE_SIZES
from src.render.styles import SIMPLE_SHEET_ID, TARGET_SHEET_ID
from src.tiles.geometry import MAX_ZOOM, GeoPoint

CONFIG_VERSION = 1


class CenterPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lat: float = Field(43.0731, ge=-85.05113, le=85.05113)
    lon: float = Field(-89.4012, ge=-180, le=180)

    def point(self) -> GeoPoint:
        return GeoPoint(self.lat, self.lon)


class PathsConfig(BaseModel):
    """Artifact roots; relative paths resolve against the config file's directory"""

    model_config = ConfigDict(extra="forbid")

    tilesets: Path = Path("artifacts/tilesets")
    checkpoints: Path = Path("artifacts/checkpoints")
    reports: Path = Path("artifacts/reports")

    @model_validator(mode="after")
    def _distinct(self) -> "PathsConfig":
        roots = [self.tilesets, self.checkpoints, self.reports]
        if len(set(roots)) != len(roots):
            raise ValueError("tilesets, checkpoints and reports must be distinct directories")
        return self

    def resolved(self, base: Path) -> "PathsConfig":
        return PathsConfig(
            tilesets=base / self.tilesets,
            checkpoints=base / self.checkpoints,
            reports=base / self.reports,
        )


class PipelineConfig(BaseModel):
    """Everything one desk-scale experiment needs"""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = CONFIG_VERSION
    seed: int = Field(2024, ge=0)
    city: CityParams = CityParams()
    center: CenterPoint = CenterPoint()
    zooms: list[int] = [15, 18]
    tile_size: int = 64
    tile_counts: dict[int, int] = {15: 64, 18: 256}
    test_fraction: float = Field(0.2, ge=0, lt=1)
    nonmap_count: int = Field(400, ge=1)
    png_copies: bool = Field(False, description="Also write <y>.png beside each <y>.ppm")
    simple_sheet: str = SIMPLE_SHEET_ID
    target_sheet: str = TARGET_SHEET_ID
    models: list[str] = list(MODEL_KINDS)
    paths: PathsConfig = PathsConfig()
    pix2pix: TrainConfig = TrainConfig()
    cyclegan: TrainConfig = TrainConfig()
    ismap: IsMapConfig = IsMapConfig()

    @field_validator("zooms")
    @classmethod
    def _valid_zooms(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("at least one zoom level is required")
        if len(set(v)) != len(v) or any(not 0 <= z <= MAX_ZOOM for z in v):
            raise ValueError(f"zooms must be distinct levels in [0, {MAX_ZOOM}]")
        return sorted(v)

    @field_validator("tile_size")
    @classmethod
    def _valid_size(cls, v: int) -> int:
        if v not in TILE_SIZES:
            raise ValueError(f"tile_size must be one of {TILE_SIZES}")
        return v

    @field_validator("models")
    @classmethod
    def _valid_models(cls, v: list[str]) -> list[str]:
        unknown = set(v) - set(MODEL_KINDS)
        if unknown:
            raise ValueError(f"unknown models {sorted(unknown)}; expected {MODEL_KINDS}")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> "PipelineConfig":
        missing = [z for z in self.zooms if z not in self.tile_counts]
        if missing:
            raise ValueError(f"tile_counts has no entry for zoom(s) {missing}")
        if any(n < 1 for n in self.tile_counts.values()):
            raise ValueError("tile_counts must be positive")
        for name in MODEL_KINDS:
            if getattr(self, name).image_size != self.tile_size:
                raise ValueError(f"{name}.image_size must equal tile_size ({self.tile_size})")
        return self

    def train_config(self, model: str) -> TrainConfig:
        if model not in MODEL_KINDS:
            raise ConfigError(f"Unknown model {model!r}; expected one of {MODEL_KINDS}")
        return getattr(self, model)

    def hash(self) -> str:
        return config_hash(self)


def default_config() -> PipelineConfig:
    return PipelineConfig()


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Read and validate a config file; relative artifact paths resolve next to it

    Raises:
        ConfigError: Missing file, invalid JSON or failed validation
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict) or "version" not in raw:
        raise ConfigError(f"{path}: missing required field 'version'")
    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ConfigError(f"{path}: {where}: {first['msg']} ({e.error_count()} errors)") from e
    config.paths = config.paths.resolved(path.parent)
    return config


def save_config(config: PipelineConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
