"""
IsMap: map / non-map classifier training, inference and evaluation

Maps are the positive class. A tile is labeled a map when its probability is
at least 0.5, so an exact tie counts as a map.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.autograd import ops
from src.autograd.optim import Adam
from src.autograd.tensor import Tensor, backward, no_grad
from src.core.config import get_settings
from src.core.exceptions import (
    CorruptCheckpointError,
    EmptyDatasetError,
    SingleClassDatasetError,
    TensorError,
    TileSizeMismatchError,
)
from src.datasets.manifest import DatasetManifest, Split
from src.gan.checkpoint import CheckpointMeta, config_hash, load_checkpoint, save_checkpoint
from src.gan.data import load_arrays
from src.ismap.metrics import EvalReport, confusion_from_predictions, metrics
from src.ismap.network import IsMapNet
from src.render.raster import TILE_SIZES, RasterTile, resize_tile, tile_to_array

MAP_THRESHOLD = 0.5
_CLASSIFY_BATCH = 32


def _probability(logits: np.ndarray) -> np.ndarray:
    """Logistic function; exactly 0.5 at logit 0"""
    return 0.5 * (1.0 + np.tanh(0.5 * logits.astype(np.float64)))


class IsMapConfig(BaseModel):
    """Classifier hyperparameters and training-set composition"""

    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(5, gt=0)
    lr: float = Field(1e-3, gt=0)
    batch_size: int = Field(1, ge=1)
    seed: int = 0
    image_size: int = 64
    holdout_fraction: float = Field(0.1, ge=0, lt=1)
    positives: int = Field(400, ge=1, description="Map tiles sampled from the styled tilesets")

    @field_validator("image_size")
    @classmethod
    def _supported_size(cls, v: int) -> int:
        if v not in TILE_SIZES:
            raise ValueError(f"image_size must be one of {TILE_SIZES}")
        return v


@dataclass
class Classification:
    probability: float
    is_map: bool


@dataclass
class IsMapResult:
    checkpoint_dir: Path
    heldout_accuracy: Optional[float]
    history: list[dict[str, float]] = field(default_factory=list)
    steps: int = 0


def _split_holdout(
    labels: np.ndarray, fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified seeded split into (train, holdout) index arrays"""
    rng = np.random.default_rng([seed, 6, 0])
    train_idx, hold_idx = [], []
    for cls in (True, False):
        idx = np.flatnonzero(labels == cls)
        idx = idx[rng.permutation(len(idx))]
        n_hold = min(int(round(len(idx) * fraction)), len(idx) - 1)
        hold_idx.append(idx[:n_hold])
        train_idx.append(idx[n_hold:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(hold_idx))


class IsMapClassifier:
    """A trained IsMapNet with its configuration; read-only after construction"""

    def __init__(self, net: IsMapNet, cfg: IsMapConfig):
        self.net = net.eval()
        self.cfg = cfg

    @classmethod
    def from_checkpoint(cls, directory: Union[str, Path]) -> "IsMapClassifier":
        meta, params, _ = load_checkpoint(directory)
        if meta.kind != "ismap":
            raise CorruptCheckpointError(f"{directory} holds a {meta.kind} checkpoint, not ismap")
        cfg = IsMapConfig.model_validate(meta.config)
        net = IsMapNet(cfg.seed)
        net.load_state_dict(params)
        return cls(net, cfg)

    def _check_size(self, size: int):
        if size != self.cfg.image_size:
            raise TileSizeMismatchError(
                f"Classifier was trained on {self.cfg.image_size}px tiles, got {size}px"
            )

    def prepare(self, tile: Union[RasterTile, np.ndarray], resize: bool = False) -> np.ndarray:
        """(3, S, S) array for a tile at the training size

        Raises:
            TileSizeMismatchError: The tile is another size and resize is off
        """
        if isinstance(tile, np.ndarray) and tile.ndim == 3 and tile.shape[0] == 3:
            self._check_size(tile.shape[-1])
            return tile.astype(np.float32)
        if isinstance(tile, np.ndarray):
            tile = RasterTile(tile)
        if resize:
            tile = resize_tile(tile, self.cfg.image_size)
        self._check_size(tile.size)
        return tile_to_array(tile)

    def probabilities(self, arrays: np.ndarray) -> np.ndarray:
        """Map probability per row of an (n, 3, S, S) batch"""
        self._check_size(arrays.shape[-1])
        with no_grad():
            logits = self.net(Tensor(arrays)).data[:, 0]
        return _probability(logits)

    def classify(
        self, tile: Union[RasterTile, np.ndarray], resize: bool = False
    ) -> Classification:
        prob = float(self.probabilities(self.prepare(tile, resize)[None])[0])
        return Classification(probability=prob, is_map=prob >= MAP_THRESHOLD)

    def classify_batch(self, arrays: np.ndarray) -> list[Classification]:
        """Classify an (n, 3, S, S) batch; chunks run concurrently on CARTOGAN_THREADS"""
        if len(arrays) == 0:
            return []
        chunks = [arrays[i : i + _CLASSIFY_BATCH] for i in range(0, len(arrays), _CLASSIFY_BATCH)]
        workers = min(get_settings().threads, len(chunks))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            probs = np.concatenate(list(pool.map(self.probabilities, chunks)))
        return [Classification(float(p), bool(p >= MAP_THRESHOLD)) for p in probs]

    def save(self, directory: Union[str, Path], meta: Optional[CheckpointMeta] = None) -> Path:
        meta = meta or CheckpointMeta(
            kind="ismap",
            tile_size=self.cfg.image_size,
            config=self.cfg.model_dump(mode="json"),
            config_hash=config_hash(self.cfg),
        )
        return save_checkpoint(directory, meta, self.net.state_dict())


def train_ismap(
    maps: np.ndarray,
    nonmaps: np.ndarray,
    cfg: IsMapConfig,
    out_dir: Union[str, Path],
    on_epoch: Optional[Callable[[dict[str, float]], None]] = None,
) -> IsMapResult:
    """Train IsMapNet on map (positive) and non-map (negative) arrays

    Both inputs are (n, 3, S, S) in [-1, 1] at cfg.image_size. A stratified
    holdout_fraction of each class is kept aside and its accuracy reported.

    Raises:
        SingleClassDatasetError: Either class is empty
    """
    if len(maps) == 0 or len(nonmaps) == 0:
        raise SingleClassDatasetError(
            f"IsMap needs both classes, got {len(maps)} maps and {len(nonmaps)} non-maps"
        )
    xs = np.concatenate([maps, nonmaps]).astype(np.float32)
    labels = np.concatenate([np.ones(len(maps), bool), np.zeros(len(nonmaps), bool)])
    train_idx, hold_idx = _split_holdout(labels, cfg.holdout_fraction, cfg.seed)
    targets = labels.astype(np.float32)[:, None]

    net = IsMapNet(cfg.seed)
    opt = Adam(net.named_parameters(), cfg.lr, (0.9, 0.999))
    clf = IsMapClassifier(net, cfg)
    history: list[dict[str, float]] = []
    heldout: Optional[float] = None
    logger.info(
        f"Training IsMap on {len(train_idx)} tiles "
        f"({len(maps)} maps / {len(nonmaps)} non-maps, {len(hold_idx)} held out)"
    )

    for epoch in range(1, cfg.epochs + 1):
        net.train()
        order = train_idx[np.random.default_rng([cfg.seed, 6, epoch]).permutation(len(train_idx))]
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            opt.zero_grad()
            loss = ops.bce_with_logits(net(Tensor(xs[idx])), Tensor(targets[idx]))
            backward(loss)
            opt.step()
            total += loss.item() * len(idx)
        mean_loss = total / len(order)
        if not np.isfinite(mean_loss):
            raise TensorError(f"Non-finite IsMap loss at epoch {epoch}")
        net.eval()
        row = {"epoch": float(epoch), "loss": mean_loss}
        if len(hold_idx):
            predicted = clf.probabilities(xs[hold_idx]) >= MAP_THRESHOLD
            heldout = float(np.mean(predicted == labels[hold_idx]))
            row["heldout_accuracy"] = heldout
        history.append(row)
        logger.info(f"ismap epoch={epoch} loss={mean_loss:.6f} heldout_accuracy={heldout}")
        if on_epoch is not None:
            on_epoch(row)

    meta = CheckpointMeta(
        kind="ismap",
        tile_size=cfg.image_size,
        epoch=cfg.epochs,
        step=opt.steps,
        config=cfg.model_dump(mode="json"),
        config_hash=config_hash(cfg),
        history=history,
        optimizer_steps={"ismap": opt.steps},
        extra={"heldout_accuracy": heldout, "threshold": MAP_THRESHOLD},
    )
    clf.save(out_dir, meta)
    return IsMapResult(Path(out_dir), heldout, history, opt.steps)


def load_training_set(
    map_sets: Sequence[DatasetManifest], nonmap: DatasetManifest, cfg: IsMapConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded sample of cfg.positives train tiles across map_sets, plus the non-map train split"""
    pool = [(m, e) for m in map_sets for e in m.select("train")]
    if not pool:
        raise EmptyDatasetError("No map tiles in the train split")
    negatives = nonmap.select("train")
    if not negatives:
        raise SingleClassDatasetError(f"No non-map train tiles in {nonmap.root}")
    rng = np.random.default_rng([cfg.seed, 6, 99])
    picked = np.sort(rng.permutation(len(pool))[: cfg.positives])
    maps = []
    for manifest in map_sets:
        entries = [pool[i][1] for i in picked if pool[i][0] is manifest]
        maps.append(load_arrays(manifest, entries, cfg.image_size))
    return np.concatenate(maps), load_arrays(nonmap, negatives, cfg.image_size)


def evaluate(
    clf: IsMapClassifier, positives: np.ndarray, negatives: np.ndarray, label: Optional[str] = None
) -> EvalReport:
    """Positives count into tp/fn, negatives into tn/fp

    Raises:
        EmptyDatasetError: Either set is empty
    """
    if len(positives) == 0 or len(negatives) == 0:
        raise EmptyDatasetError(
            f"Evaluation needs both sets, got {len(positives)} positives "
            f"and {len(negatives)} negatives"
        )
    predicted = [c.is_map for c in clf.classify_batch(np.concatenate([positives, negatives]))]
    truth = [True] * len(positives) + [False] * len(negatives)
    report = metrics(confusion_from_predictions(truth, predicted), label)
    logger.info(
        f"Evaluated {label or 'tiles'}: precision={report.precision:.3f} "
        f"recall={report.recall:.3f} accuracy={report.accuracy:.3f} f1={report.f1:.3f}"
    )
    return report


def evaluate_tilesets(
    clf: IsMapClassifier,
    positives: DatasetManifest,
    negatives: DatasetManifest,
    split: Optional[Split] = "test",
    zoom: Optional[int] = None,
    label: Optional[str] = None,
) -> EvalReport:
    """evaluate() over a transfer tileset (positives) and the non-map tileset (negatives)"""
    size = clf.cfg.image_size
    pos = load_arrays(positives, positives.select(split, zoom), size)
    neg = load_arrays(negatives, negatives.select(split), size)
    return evaluate(clf, pos, neg, label)


def classify(
    checkpoint_dir: Union[str, Path],
    tile: Union[RasterTile, np.ndarray],
    resize: bool = False,
) -> Classification:
    return IsMapClassifier.from_checkpoint(checkpoint_dir).classify(tile, resize)
