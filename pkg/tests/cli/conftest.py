"""
Fixtures for the CLI tests: a tiny experiment config on disk
"""

import sys

import pytest
from loguru import logger
from typer.testing import CliRunner

from src.gan.trainer import TrainConfig
from src.ismap.classifier import IsMapConfig
from src.schemas.pipeline import PipelineConfig, save_config


def tiny_pipeline_config(seed: int = 11) -> PipelineConfig:
    gan = TrainConfig(
        epochs=1, ngf=4, ndf=4, checkpoint_interval=1, sample_interval=1, sample_count=0
    )
    return PipelineConfig(
        seed=seed,
        zooms=[17],
        tile_counts={17: 4},
        test_fraction=0.25,
        nonmap_count=6,
        pix2pix=gan,
        cyclegan=gan,
        ismap=IsMapConfig(epochs=1, batch_size=4, positives=8, holdout_fraction=0.25),
    )


@pytest.fixture(autouse=True)
def restore_logging():
    """Commands point loguru at the runner's streams; put it back afterwards"""
    yield
    logger.remove()
    logger.add(sys.stderr)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    return save_config(tiny_pipeline_config(), tmp_path / "cartogan.json")
