"""
Dataset construction: one generated scene, rendered under both stylesheets

For each configured zoom a square block of tiles around the configured center
is selected (row-major, first N). One scene covers every selected tile plus a
block of margin; the simple and target tilesets are rendered from it with
identical keys and identical split tags, so pairing is exact.
"""

import math
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from loguru import logger

from src.city.features import VectorScene
from src.city.generator import generate_city
from src.city.scene_format import write_scene
from src.core.config import get_settings
from src.datasets.manifest import (
    TILE_EXT,
    DatasetManifest,
    Role,
    Split,
    assign_splits,
    make_entry,
    split_by_zoom,
    tile_relpath,
    write_manifest,
)
from src.ismap.textures import texture
from src.render.raster import write_tile
from src.render.renderer import render_tile
from src.render.styles import StyleSheet, load_sheet
from src.schemas.pipeline import PipelineConfig
from src.tiles.geometry import GeoBounds, TileCoord, geo_to_tile, tile_bounds

SCENE_DIR = "scene"
SCENE_NAME = "scene.txt"

# Seed offsets; each artifact family draws from its own stream
_CITY_STREAM = 0
_NONMAP_STREAM = 2


@dataclass
class DatasetBuild:
    simple: DatasetManifest
    target: DatasetManifest
    nonmap: DatasetManifest
    scene_path: Path
    tiles: dict[int, list[TileCoord]]


def tileset_dir(config: PipelineConfig, role: str) -> Path:
    return config.paths.tilesets / role


def select_tiles(config: PipelineConfig, z: int) -> list[TileCoord]:
    """First N tiles, row-major, of the smallest square block centered on config.center"""
    count = config.tile_counts[z]
    side = math.ceil(math.sqrt(count))
    n = 1 << z
    if side > n:
        raise ValueError(f"z{z} has only {n * n} tiles, {count} requested")
    center = geo_to_tile(config.center.point(), z)
    x0 = min(max(center.x - side // 2, 0), n - side)
    y0 = min(max(center.y - side // 2, 0), n - side)
    block = [TileCoord(z, x0 + dx, y0 + dy) for dy in range(side) for dx in range(side)]
    return block[:count]


def scene_bounds(tiles: dict[int, list[TileCoord]], margin: float) -> GeoBounds:
    coords = [t for level in tiles.values() for t in level]
    bounds = tile_bounds(coords[0])
    for t in coords[1:]:
        bounds = bounds.union(tile_bounds(t))
    return bounds.expand(margin)


def _fresh(root: Path) -> Path:
    if root.exists():
        shutil.rmtree(root)
    root.mkdir(parents=True)
    return root


def render_tileset(
    scene: VectorScene,
    coords: list[TileCoord],
    sheet: StyleSheet,
    root: Path,
    role: Role,
    tags: dict[str, Split],
    seed: int,
    size: int,
    png_copies: bool = False,
) -> DatasetManifest:
    """Render every coord under `sheet` into root/z/x/y.ppm and write the manifest

    Rendering fans out over CARTOGAN_THREADS workers; output order and bytes
    do not depend on the worker count.
    """
    root = _fresh(root)

    def _one(t: TileCoord):
        tile = render_tile(scene, t, sheet, size)
        path = write_tile(tile, root / tile_relpath(t), png_copy=png_copies)
        return make_entry(root, path, str(t), tags[str(t)])

    workers = max(1, min(get_settings().threads, len(coords)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        entries = list(pool.map(_one, coords))
    manifest = DatasetManifest(
        role=role, seed=seed, stylesheet=sheet.id, tile_size=size, entries=entries
    )
    write_manifest(manifest, root)
    return manifest


def build_nonmap(config: PipelineConfig) -> DatasetManifest:
    """Procedural textures nonmap/0000... with their own seeded split"""
    root = _fresh(tileset_dir(config, "nonmap"))
    seed = config.seed * 1000 + _NONMAP_STREAM * 100
    keys = [f"nonmap/{i:04d}" for i in range(config.nonmap_count)]
    tags = assign_splits(keys, seed, config.test_fraction)

    def _one(i: int):
        path = write_tile(texture(seed, i, config.tile_size), root / f"{i:04d}.{TILE_EXT}")
        return make_entry(root, path, keys[i], tags[keys[i]])

    workers = max(1, min(get_settings().threads, config.nonmap_count))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        entries = list(pool.map(_one, range(config.nonmap_count)))
    manifest = DatasetManifest(
        role="nonmap",
        seed=seed,
        stylesheet="textures",
        tile_size=config.tile_size,
        entries=entries,
    )
    write_manifest(manifest, root)
    return manifest


def build_datasets(config: PipelineConfig) -> DatasetBuild:
    """Generate the scene and the simple, target and non-map tilesets

    Rebuilding from the same config reproduces every file byte for byte.
    Only the scene, simple, target and nonmap directories under the tilesets
    root are replaced.
    """
    tiles = {z: select_tiles(config, z) for z in config.zooms}
    bounds = scene_bounds(tiles, config.city.block_size)
    scene = generate_city(config.seed * 1000 + _CITY_STREAM, bounds, config.city)
    scene_path = write_scene(scene, _fresh(tileset_dir(config, SCENE_DIR)) / SCENE_NAME)

    coords = [t for z in config.zooms for t in tiles[z]]
    tags = split_by_zoom([str(t) for t in coords], config.seed, config.test_fraction)
    manifests = {}
    for role, sheet_id in (("simple", config.simple_sheet), ("target", config.target_sheet)):
        sheet = load_sheet(sheet_id)
        logger.info(f"Rendering {len(coords)} {role} tiles with {sheet.id}")
        manifests[role] = render_tileset(
            scene,
            coords,
            sheet,
            tileset_dir(config, role),
            role,
            tags,
            config.seed,
            config.tile_size,
            config.png_copies,
        )
    nonmap = build_nonmap(config)
    n_test = sum(1 for tag in tags.values() if tag == "test")
    logger.info(
        f"Built datasets under {config.paths.tilesets}: {len(coords)} tile pairs "
        f"({n_test} test), {len(nonmap)} non-map textures"
    )
    return DatasetBuild(manifests["simple"], manifests["target"], nonmap, scene_path, tiles)
