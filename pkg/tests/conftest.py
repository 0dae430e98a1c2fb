"""
Pytest configuration and fixtures
"""

import numpy as np
import pytest

from src.city.features import VectorScene
from src.city.generator import CityParams, generate_city
from src.core.config import get_settings
from src.gan.trainer import GanTrainer, TrainConfig
from src.render.raster import tile_to_array
from src.render.renderer import render_tile
from src.render.styles import builtin_simple_sheet, builtin_target_sheet
from src.tiles.geometry import TileCoord, tile_bounds, tile_children

MADISON_Z15 = TileCoord(15, 8246, 12031)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Keep tests from writing logs into the working tree"""
    monkeypatch.setenv("CARTOGAN_LOG_TO_FILE", "false")
    monkeypatch.setenv("CARTOGAN_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("CARTOGAN_THREADS", "2")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def madison_tile() -> TileCoord:
    """The z15 tile over downtown Madison, WI"""
    return MADISON_Z15


@pytest.fixture(scope="session")
def madison_scene() -> VectorScene:
    """Generated city covering the Madison z15 tile plus one block"""
    bounds = tile_bounds(MADISON_Z15).expand(120.0)
    return generate_city(2024, bounds, CityParams())


@pytest.fixture(scope="session")
def z18_tiles(madison_scene) -> tuple[np.ndarray, np.ndarray]:
    """Simple and target renderings of the 64 z18 tiles under the Madison tile"""
    coords = [MADISON_Z15]
    for _ in range(3):
        coords = [c for parent in coords for c in tile_children(parent)]

    def render(sheet) -> np.ndarray:
        return np.stack([tile_to_array(render_tile(madison_scene, c, sheet, 64)) for c in coords])

    return render(builtin_simple_sheet()), render(builtin_target_sheet())


@pytest.fixture(scope="session")
def overfit_pix2pix(tmp_path_factory, z18_tiles):
    """Pix2Pix trained for 400 steps on the first eight z18 pairs; (trainer, result)"""
    xs, ys = z18_tiles[0][:8], z18_tiles[1][:8]
    cfg = TrainConfig(epochs=50, max_steps=400, seed=0, checkpoint_interval=50, sample_count=0)
    trainer = GanTrainer("pix2pix", cfg, tmp_path_factory.mktemp("pix2pix"))
    return trainer, trainer.fit(xs, ys)
