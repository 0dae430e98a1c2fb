"""
Checkpoint directories

A checkpoint is a directory holding `params.cgt` (network parameters),
`optim.cgt` (Adam moments), the `checkpoint.json` sidecar (kind, epoch,
config, loss history, optimizer step counts, random generator states) and
`losses.csv`.
"""

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.autograd.serialization import load_tensors, save_tensors
from src.core.exceptions import CorruptCheckpointError, PrerequisiteMissingError

PARAMS_NAME = "params.cgt"
OPTIM_NAME = "optim.cgt"
SIDECAR_NAME = "checkpoint.json"
LOSSES_NAME = "losses.csv"


def config_hash(config: BaseModel, exclude: Optional[set[str]] = None) -> str:
    """sha256 of the canonical JSON dump"""
    payload = json.dumps(config.model_dump(mode="json", exclude=exclude), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class CheckpointMeta(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = Field(..., description="pix2pix, cyclegan or ismap")
    tile_size: int
    epoch: int = 0
    step: int = 0
    config: dict[str, Any] = {}
    config_hash: str = ""
    history: list[dict[str, float]] = []
    optimizer_steps: dict[str, int] = {}
    rng_states: dict[str, dict[str, Any]] = {}
    extra: dict[str, Any] = {}


def write_losses_csv(history: list[dict[str, float]], path: Union[str, Path]):
    """epoch then the remaining columns of the first row, e.g. epoch,loss_g,loss_d[,loss_cyc]"""
    path = Path(path)
    present = history[0] if history else {"loss_g": 0.0, "loss_d": 0.0}
    columns = ["epoch"] + [c for c in present if c != "epoch"]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in history:
            writer.writerow([int(row["epoch"])] + [f"{row[c]:.6f}" for c in columns[1:]])


def save_checkpoint(
    directory: Union[str, Path],
    meta: CheckpointMeta,
    params: dict[str, np.ndarray],
    optim: Optional[dict[str, np.ndarray]] = None,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_tensors(params, directory / PARAMS_NAME)
    save_tensors(optim or {}, directory / OPTIM_NAME)
    (directory / SIDECAR_NAME).write_text(meta.model_dump_json(indent=2) + "\n", encoding="utf-8")
    write_losses_csv(meta.history, directory / LOSSES_NAME)
    logger.info(f"Saved {meta.kind} checkpoint at epoch {meta.epoch}: {directory}")
    return directory


def checkpoint_exists(directory: Union[str, Path]) -> bool:
    directory = Path(directory)
    return (directory / SIDECAR_NAME).is_file() and (directory / PARAMS_NAME).is_file()


def load_meta(directory: Union[str, Path]) -> CheckpointMeta:
    directory = Path(directory)
    sidecar = directory / SIDECAR_NAME
    if not sidecar.is_file():
        raise PrerequisiteMissingError("checkpoint", directory, hint="train")
    try:
        return CheckpointMeta.model_validate_json(sidecar.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise CorruptCheckpointError(
            f"{sidecar}: invalid sidecar ({e.error_count()} errors)"
        ) from e


def load_checkpoint(
    directory: Union[str, Path],
) -> tuple[CheckpointMeta, dict[str, np.ndarray], dict[str, np.ndarray]]:
    """(meta, params, optimizer moments)"""
    directory = Path(directory)
    meta = load_meta(directory)
    if not (directory / PARAMS_NAME).is_file():
        raise PrerequisiteMissingError(
            "checkpoint parameters", directory / PARAMS_NAME, hint="train"
        )
    params = load_tensors(directory / PARAMS_NAME)
    optim_path = directory / OPTIM_NAME
    optim = load_tensors(optim_path) if optim_path.is_file() else {}
    return meta, params, optim


def subset(tensors: dict[str, np.ndarray], prefix: str) -> dict[str, np.ndarray]:
    """Entries under `prefix.` with the prefix stripped"""
    cut = len(prefix) + 1
    return {k[cut:]: v for k, v in tensors.items() if k.startswith(prefix + ".")}


def prefixed(tensors: dict[str, np.ndarray], prefix: str) -> dict[str, np.ndarray]:
    return {f"{prefix}.{k}": v for k, v in tensors.items()}
