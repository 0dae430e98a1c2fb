"""
Pydantic schemas
"""

from src.schemas.pipeline import (
    CONFIG_VERSION,
    CenterPoint,
    PathsConfig,
    PipelineConfig,
    default_config,
    load_config,
    save_config,
)

__all__ = [
    "CONFIG_VERSION",
    "CenterPoint",
    "PathsConfig",
    "PipelineConfig",
    "default_config",
    "load_config",
    "save_config",
]
