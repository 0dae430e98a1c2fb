"""
Build a manifest for an existing z/x/y tile tree
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from loguru import logger

from src.core.config import get_settings
from src.core.exceptions import (
    CorruptTileError,
    EmptyDatasetError,
    GeometryError,
    MixedTileSizeError,
)
from src.datasets.manifest import (
    MANIFEST_NAME,
    DatasetManifest,
    Role,
    make_entry,
    split_by_zoom,
    write_manifest,
)
from src.render.raster import IMAGE_SUFFIXES, read_tile
from src.tiles.geometry import TileCoord


@dataclass
class IngestReject:
    path: Path
    reason: str


@dataclass
class IngestResult:
    manifest: DatasetManifest
    rejects: list[IngestReject]


def parse_tile_path(root: Path, path: Path) -> TileCoord:
    """TileCoord from root/z/x/y.<ext>

    Raises:
        GeometryError: Layout or indices are not a valid tile address
    """
    rel = path.relative_to(root)
    if len(rel.parts) != 3:
        raise GeometryError(f"expected z/x/y{path.suffix}, got {rel.as_posix()}")
    return TileCoord.parse(f"{rel.parts[0]}/{rel.parts[1]}/{path.stem}")


def _inspect(root: Path, path: Path) -> tuple[Optional[TileCoord], Optional[int], str]:
    try:
        coord = parse_tile_path(root, path)
    except GeometryError as e:
        return None, None, str(e)
    try:
        tile = read_tile(path)
    except CorruptTileError as e:
        return None, None, str(e)
    return coord, tile.size, ""


def ingest_directory(
    directory: Union[str, Path],
    role: Role = "target",
    seed: int = 0,
    test_fraction: float = 0.2,
) -> IngestResult:
    """Walk a z/x/y.<ppm|png> tree and write its manifest

    Files that are not tile images, sit at the wrong depth, have non-numeric
    or out-of-range indices or fail to decode are rejected one by one with a
    warning; the rest are accepted. Splits follow split_by_zoom(seed), so a
    tree written by the dataset builder ingests with its original tags.

    Raises:
        EmptyDatasetError: No acceptable tile in the tree
        MixedTileSizeError: Accepted tiles disagree on size
    """
    root = Path(directory)
    if not root.is_dir():
        raise EmptyDatasetError(f"Not a directory: {root}")

    rejects: list[IngestReject] = []
    candidates: list[Path] = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        if path.name == MANIFEST_NAME and path.parent == root:
            continue
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            rejects.append(IngestReject(path, f"not a tile image ({path.suffix or 'no suffix'})"))
            continue
        if path.suffix.lower() == ".png" and path.with_suffix(".ppm").is_file():
            logger.debug(f"{path} is a PNG copy of its .ppm tile")
            continue
        candidates.append(path)

    workers = max(1, min(get_settings().threads, len(candidates)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        inspected = list(pool.map(lambda p: _inspect(root, p), candidates))

    accepted: dict[str, tuple[Path, int]] = {}
    for path, (coord, size, reason) in zip(candidates, inspected):
        if coord is None:
            rejects.append(IngestReject(path, reason))
        elif str(coord) in accepted:
            rejects.append(IngestReject(path, f"duplicate tile {coord}"))
        else:
            accepted[str(coord)] = (path, size)

    for reject in rejects:
        logger.warning(f"Skipping {reject.path}: {reject.reason}")
    if not accepted:
        raise EmptyDatasetError(f"No tiles found under {root}")
    sizes = sorted({size for _, size in accepted.values()})
    if len(sizes) > 1:
        raise MixedTileSizeError(f"Tiles under {root} have mixed sizes {sizes}")

    tags = split_by_zoom(accepted, seed, test_fraction)
    entries = [
        make_entry(root, path, key, tags[key])
        for key, (path, _) in sorted(accepted.items(), key=lambda kv: TileCoord.parse(kv[0]))
    ]
    manifest = DatasetManifest(
        role=role, seed=seed, stylesheet=None, tile_size=sizes[0], entries=entries
    )
    write_manifest(manifest, root)
    logger.info(f"Ingested {len(entries)} tiles from {root} ({len(rejects)} rejected)")
    return IngestResult(manifest, rejects)
