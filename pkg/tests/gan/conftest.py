"""
Fixtures for the GAN tests: small tilesets written to tmp_path
"""

from pathlib import Path

import numpy as np
import pytest

from src.datasets.manifest import DatasetManifest, make_entry, tile_relpath, write_manifest
from src.gan.trainer import TrainConfig
from src.render.raster import write_tile
from src.tiles.geometry import TileCoord, tile_children


def write_tileset(
    root: Path, role: str, tiles: dict[TileCoord, np.ndarray], test: set[TileCoord] = frozenset()
) -> DatasetManifest:
    entries = []
    for coord, pixels in sorted(tiles.items(), key=lambda kv: str(kv[0])):
        path = write_tile(pixels, root / tile_relpath(coord))
        split = "test" if coord in test else "train"
        entries.append(make_entry(root, path, str(coord), split))
    size = next(iter(tiles.values())).shape[0] if tiles else 64
    manifest = DatasetManifest(role=role, tile_size=size, entries=entries)
    write_manifest(manifest, root)
    return manifest


def stripes(seed: int, size: int = 64) -> np.ndarray:
    """Simple-style stand-in: two colors in random horizontal bands"""
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 2, size=size).astype(bool)
    img = np.empty((size, size, 3), dtype=np.uint8)
    img[rows] = (240, 240, 240)
    img[~rows] = (40, 40, 40)
    return img


def restyle(img: np.ndarray) -> np.ndarray:
    """Target-style stand-in: a fixed color mapping of the simple tile"""
    out = img.copy()
    out[..., 0] = 255 - img[..., 0]
    out[..., 2] = img[..., 2] // 2
    return out


@pytest.fixture
def small_cfg() -> TrainConfig:
    return TrainConfig(
        epochs=1,
        ngf=4,
        ndf=4,
        seed=3,
        checkpoint_interval=1,
        sample_interval=1,
        sample_count=0,
    )


@pytest.fixture
def paired_sets(tmp_path, madison_tile):
    """Four z17 tiles under the Madison tile; the last one is a test tile"""
    coords = [c for child in tile_children(madison_tile) for c in tile_children(child)][:4]
    simple = {c: stripes(i) for i, c in enumerate(coords)}
    target = {c: restyle(img) for c, img in simple.items()}
    test = {coords[-1]}
    return (
        write_tileset(tmp_path / "simple", "simple", simple, test),
        write_tileset(tmp_path / "target", "target", target, test),
    )
