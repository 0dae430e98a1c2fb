"""
Tile loading for training, transfer and classification
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from src.core.config import get_settings
from src.core.exceptions import EmptyDatasetError, TileSizeMismatchError
from src.datasets.manifest import DatasetManifest, ManifestEntry, Split
from src.render.raster import read_tile, resize_tile, tile_to_array


def load_arrays(
    manifest: DatasetManifest,
    entries: Sequence[ManifestEntry],
    resize_to: Optional[int] = None,
) -> np.ndarray:
    """Decode tiles in entry order into an (n, 3, S, S) float32 array in [-1, 1]

    Decoding runs on up to CARTOGAN_THREADS workers; a corrupt file raises
    CorruptTileError naming its path. With resize_to, S is resize_to instead
    of the manifest tile size.
    """
    size = manifest.tile_size
    out_size = resize_to or size
    if not entries:
        return np.zeros((0, 3, out_size, out_size), dtype=np.float32)
    paths = [manifest.path_of(e) for e in entries]
    workers = min(get_settings().threads, len(paths))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        tiles = list(pool.map(read_tile, paths))
    for path, tile in zip(paths, tiles):
        if tile.size != size:
            raise TileSizeMismatchError(f"{path} is {tile.size}px, manifest says {size}px")
    logger.debug(f"Decoded {len(tiles)} {manifest.role} tiles")
    return np.stack([tile_to_array(resize_tile(t, out_size)) for t in tiles])


def paired_entries(
    simple: DatasetManifest,
    target: DatasetManifest,
    split: Split = "train",
    zoom: Optional[int] = None,
) -> tuple[list[ManifestEntry], list[ManifestEntry]]:
    """Entries sharing a tile key in both tilesets, sorted by key"""
    by_key = {e.key: e for e in target.select(split, zoom)}
    left = sorted((e for e in simple.select(split, zoom) if e.key in by_key), key=lambda e: e.key)
    if not left:
        raise EmptyDatasetError(
            f"No paired {split} tiles{'' if zoom is None else f' at z{zoom}'} "
            f"between {simple.root} and {target.root}"
        )
    return left, [by_key[e.key] for e in left]


def unpaired_entries(
    manifest: DatasetManifest, split: Split = "train", zoom: Optional[int] = None
) -> list[ManifestEntry]:
    entries = sorted(manifest.select(split, zoom), key=lambda e: e.key)
    if not entries:
        raise EmptyDatasetError(
            f"No {split} tiles{'' if zoom is None else f' at z{zoom}'} in {manifest.root}"
        )
    return entries
