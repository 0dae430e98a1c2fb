"""
Fixtures for the dataset tests
"""

import pytest

from src.schemas.pipeline import PathsConfig, PipelineConfig


@pytest.fixture
def tiny_config(tmp_path) -> PipelineConfig:
    """Four z17 tiles around downtown Madison and six textures"""
    return PipelineConfig(
        seed=11,
        zooms=[17],
        tile_counts={17: 4},
        test_fraction=0.25,
        nonmap_count=6,
        paths=PathsConfig(
            tilesets=tmp_path / "tilesets",
            checkpoints=tmp_path / "checkpoints",
            reports=tmp_path / "reports",
        ),
    )
