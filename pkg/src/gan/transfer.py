"""
Apply a trained generator to a simple-style tileset
"""

from pathlib import Path
from typing import Optional, Union

from loguru import logger

from src.autograd.tensor import Tensor, no_grad
from src.core.exceptions import CorruptCheckpointError, TileSizeMismatchError
from src.datasets.manifest import (
    DatasetManifest,
    Split,
    make_entry,
    tile_relpath,
    write_manifest,
)
from src.gan.checkpoint import load_checkpoint, subset
from src.gan.data import load_arrays
from src.gan.networks import GeneratorNet
from src.gan.trainer import TrainConfig
from src.render.raster import array_to_tile, write_tile

TRANSFER_BATCH = 16


def load_generator(checkpoint_dir: Union[str, Path], name: str = "G") -> GeneratorNet:
    """Generator `name` of a pix2pix or cyclegan checkpoint, in eval mode"""
    meta, params, _ = load_checkpoint(checkpoint_dir)
    if meta.kind not in ("pix2pix", "cyclegan"):
        raise CorruptCheckpointError(f"{checkpoint_dir} holds a {meta.kind} checkpoint, not a GAN")
    cfg = TrainConfig.model_validate(meta.config)
    G = GeneratorNet(cfg.image_size, cfg.ngf, cfg.seed, cfg.dropout)
    G.load_state_dict(subset(params, name))
    return G.eval()


def transfer(
    checkpoint_dir: Union[str, Path],
    manifest: DatasetManifest,
    out_dir: Union[str, Path],
    split: Optional[Split] = "test",
    zoom: Optional[int] = None,
    png_copies: bool = False,
) -> DatasetManifest:
    """Write G(tile) for every selected tile of `manifest` as a transfer tileset

    Outputs keep the key and split of their source tile and are written as
    <z>/<x>/<y>.ppm, with a .png beside each when png_copies is set. For cyclegan
    checkpoints G is the simple -> target direction.

    Raises:
        PrerequisiteMissingError: No checkpoint in checkpoint_dir
        TileSizeMismatchError: Checkpoint and tileset sizes differ
    """
    out_dir = Path(out_dir)
    G = load_generator(checkpoint_dir)
    if G.size != manifest.tile_size:
        raise TileSizeMismatchError(
            f"Checkpoint {checkpoint_dir} expects {G.size}px tiles, "
            f"{manifest.root} holds {manifest.tile_size}px"
        )
    selected = sorted(manifest.select(split, zoom), key=lambda e: e.key)
    entries = []
    for start in range(0, len(selected), TRANSFER_BATCH):
        batch = selected[start : start + TRANSFER_BATCH]
        xs = load_arrays(manifest, batch)
        with no_grad():
            out = G(Tensor(xs)).data
        for entry, arr in zip(batch, out):
            path = write_tile(
                array_to_tile(arr), out_dir / tile_relpath(entry.coord), png_copy=png_copies
            )
            entries.append(make_entry(out_dir, path, entry.key, entry.split))

    result = DatasetManifest(
        role="transfer",
        seed=manifest.seed,
        stylesheet=f"transfer:{Path(checkpoint_dir).name}",
        tile_size=manifest.tile_size,
        entries=entries,
    )
    write_manifest(result, out_dir)
    logger.info(f"Transferred {len(entries)} tiles into {out_dir}")
    return result
