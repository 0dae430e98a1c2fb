"""
Tileset manifests

A manifest is the signed inventory of one tileset directory: the role of the
tiles, the stylesheet and seed that produced them, the zoom levels present,
and one entry per file with its key, relative path, sha256 and split tag.
Map tiles are binary PPM (P6) at <z>/<x>/<y>.ppm.
"""

import hashlib
import json
from pathlib import Path
from typing import Iterable, Literal, Optional, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, model_validator

from src.core.exceptions import (
    EmptyDatasetError,
    ManifestIntegrityError,
    PrerequisiteMissingError,
)
from src.tiles.geometry import TileCoord

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1
TILE_EXT = "ppm"

Role = Literal["simple", "target", "transfer", "nonmap"]
Split = Literal["train", "test"]


class ManifestEntry(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    key: str = Field(..., min_length=1, description="z/x/y for map tiles, nonmap/<n> otherwise")
    path: str = Field(..., min_length=1, description="POSIX path relative to the tileset root")
    sha256: str = Field(..., min_length=64, max_length=64)
    split: Split = "train"

    @property
    def coord(self) -> TileCoord:
        return TileCoord.parse(self.key)

    @property
    def zoom(self) -> Optional[int]:
        return self.coord.z if not self.key.startswith("nonmap/") else None


class DatasetManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = MANIFEST_VERSION
    role: Role
    seed: int = 0
    stylesheet: Optional[str] = None
    tile_size: int = Field(64, gt=0)
    zooms: list[int] = Field(default_factory=list, description="Zoom levels present, ascending")
    entries: list[ManifestEntry] = []

    _root: Optional[Path] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _zooms_match_entries(self) -> "DatasetManifest":
        present = sorted({e.zoom for e in self.entries if e.zoom is not None})
        if not self.zooms:
            self.zooms = present
        elif self.zooms != present:
            raise ValueError(f"zooms {self.zooms} do not match the entries' zooms {present}")
        return self

    @property
    def root(self) -> Path:
        if self._root is None:
            raise ValueError("Manifest is not bound to a directory")
        return self._root

    def bind(self, root: Union[str, Path]) -> "DatasetManifest":
        self._root = Path(root)
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> list[str]:
        return [e.key for e in self.entries]

    def select(
        self, split: Optional[Split] = None, zoom: Optional[int] = None
    ) -> list[ManifestEntry]:
        """Entries with the given split tag and zoom level, in manifest order"""
        out = []
        for e in self.entries:
            if split is not None and e.split != split:
                continue
            if zoom is not None and e.zoom != zoom:
                continue
            out.append(e)
        return out

    def path_of(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    def entry(self, key: str) -> Optional[ManifestEntry]:
        for e in self.entries:
            if e.key == key:
                return e
        return None


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def make_entry(root: Path, path: Path, key: str, split: Split = "train") -> ManifestEntry:
    return ManifestEntry(
        key=key,
        path=path.relative_to(root).as_posix(),
        sha256=sha256_file(path),
        split=split,
    )


def assign_splits(keys: Iterable[str], seed: int, test_fraction: float) -> dict[str, Split]:
    """Seeded shuffle of the sorted keys; the first round(n * fraction) become test"""
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in [0, 1), got {test_fraction}")
    ordered = sorted(set(keys))
    n_test = int(round(len(ordered) * test_fraction))
    order = np.random.default_rng(seed).permutation(len(ordered))
    test = {ordered[i] for i in order[:n_test]}
    return {k: ("test" if k in test else "train") for k in ordered}


def write_manifest(manifest: DatasetManifest, root: Union[str, Path]) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    path = root / MANIFEST_NAME
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    manifest.bind(root)
    logger.info(f"Wrote {manifest.role} manifest with {len(manifest)} entries: {path}")
    return path


def load_manifest(root: Union[str, Path], verify: bool = True) -> DatasetManifest:
    """Read <root>/manifest.json; with verify, every file must exist and hash-match"""
    root = Path(root)
    path = root / MANIFEST_NAME
    if not path.exists():
        raise PrerequisiteMissingError("tileset manifest", path, hint="dataset")
    try:
        manifest = DatasetManifest.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ManifestIntegrityError(path, f"Invalid manifest ({e.__class__.__name__})") from e
    manifest.bind(root)

    seen: set[str] = set()
    for entry in manifest.entries:
        if entry.key in seen:
            raise ManifestIntegrityError(root / entry.path, f"Duplicate key {entry.key}")
        seen.add(entry.key)
        if not verify:
            continue
        file = root / entry.path
        if not file.is_file():
            raise ManifestIntegrityError(file, "Missing tile")
        if sha256_file(file) != entry.sha256:
            raise ManifestIntegrityError(file, "Hash mismatch")
    logger.debug(f"Loaded {manifest.role} manifest ({len(manifest)} entries) from {root}")
    return manifest


def tile_relpath(coord: TileCoord, ext: str = TILE_EXT) -> Path:
    return Path(str(coord.z)) / str(coord.x) / f"{coord.y}.{ext}"


def require_entries(entries: list[ManifestEntry], what: str) -> list[ManifestEntry]:
    if not entries:
        raise EmptyDatasetError(f"No {what}")
    return entries


def split_by_zoom(keys: Iterable[str], seed: int, test_fraction: float) -> dict[str, Split]:
    """assign_splits per zoom level, each level with its own seed derived from `seed`"""
    by_zoom: dict[int, list[str]] = {}
    for key in keys:
        by_zoom.setdefault(TileCoord.parse(key).z, []).append(key)
    tags: dict[str, Split] = {}
    for z, level in sorted(by_zoom.items()):
        tags.update(assign_splits(level, seed * 1000 + 100 + z, test_fraction))
    return tags
