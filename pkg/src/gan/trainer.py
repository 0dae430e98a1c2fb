"""
Paired (pix2pix) and unpaired (cyclegan) training loops

Each step first updates the discriminator(s) on detached fakes, then the
generator(s). Initialization, shuffling and dropout draw from separate seeded
streams, so a run is a deterministic function of its configuration and data.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.autograd.optim import Adam
from src.autograd.tensor import Tensor, backward, no_grad
from src.core.exceptions import (
    CheckpointError,
    EmptyDatasetError,
    TensorError,
    TileSizeMismatchError,
)
from src.datasets.manifest import DatasetManifest
from src.gan.checkpoint import (
    CheckpointMeta,
    checkpoint_exists,
    config_hash,
    load_checkpoint,
    prefixed,
    save_checkpoint,
    subset,
)
from src.gan.data import load_arrays, paired_entries, unpaired_entries
from src.gan.layers import Module
from src.gan.losses import (
    GanMode,
    cyclegan_g_loss,
    discriminator_loss,
    pix2pix_d_loss,
    pix2pix_g_loss,
)
from src.gan.networks import DiscriminatorNet, GeneratorNet
from src.render.raster import TILE_SIZES, array_to_tile, write_tile

ModelKind = Literal["pix2pix", "cyclegan"]
MODEL_KINDS: tuple[str, ...] = ("pix2pix", "cyclegan")

# fields that may change between a run and its resumption
SCHEDULE_FIELDS = {"epochs", "max_steps", "checkpoint_interval", "sample_interval", "sample_count"}
_SHUFFLE_STREAM = 7


class TrainConfig(BaseModel):
    """Hyperparameters of one GAN training run"""

    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(200, gt=0)
    lr: float = Field(2e-4, gt=0)
    beta1: float = Field(0.5, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    batch_size: int = Field(1, ge=1)
    lambda_l1: float = Field(100.0, ge=0)
    lambda_cyc: float = Field(10.0, ge=0)
    seed: int = 0
    checkpoint_interval: int = Field(50, ge=1)
    sample_interval: int = Field(50, ge=1)
    sample_count: int = Field(4, ge=0)
    image_size: int = 64
    ngf: int = Field(32, ge=1)
    ndf: int = Field(32, ge=1)
    dropout: float = Field(0.5, ge=0, lt=1)
    gan_mode: GanMode = "log"
    max_steps: Optional[int] = Field(None, gt=0)

    @field_validator("image_size")
    @classmethod
    def _supported_size(cls, v: int) -> int:
        if v not in TILE_SIZES:
            raise ValueError(f"image_size must be one of {TILE_SIZES}")
        return v

    def resume_hash(self) -> str:
        return config_hash(self, exclude=SCHEDULE_FIELDS)


@dataclass
class EpochStats:
    epoch: int
    steps: int
    loss_g: float
    loss_d: float
    loss_cyc: Optional[float] = None

    def as_row(self) -> dict[str, float]:
        row = {"epoch": float(self.epoch), "loss_g": self.loss_g, "loss_d": self.loss_d}
        if self.loss_cyc is not None:
            row["loss_cyc"] = self.loss_cyc
        return row

    def progress_line(self) -> str:
        line = f"epoch={self.epoch} loss_g={self.loss_g:.6f} loss_d={self.loss_d:.6f}"
        if self.loss_cyc is not None:
            line += f" loss_cyc={self.loss_cyc:.6f}"
        return line


@dataclass
class TrainResult:
    checkpoint_dir: Path
    history: list[dict[str, float]] = field(default_factory=list)
    steps: int = 0
    epochs_run: int = 0


EpochCallback = Callable[[EpochStats], None]


def build_networks(kind: str, cfg: TrainConfig) -> dict[str, Module]:
    size = cfg.image_size
    if kind == "pix2pix":
        return {
            "G": GeneratorNet(size, cfg.ngf, cfg.seed, cfg.dropout, stream=0),
            "D": DiscriminatorNet(size, cfg.ndf, cfg.seed, in_channels=6, stream=1),
        }
    if kind == "cyclegan":
        return {
            "G": GeneratorNet(size, cfg.ngf, cfg.seed, cfg.dropout, stream=0),
            "F": GeneratorNet(size, cfg.ngf, cfg.seed, cfg.dropout, stream=1),
            "D_X": DiscriminatorNet(size, cfg.ndf, cfg.seed, in_channels=3, stream=2),
            "D_Y": DiscriminatorNet(size, cfg.ndf, cfg.seed, in_channels=3, stream=3),
        }
    raise ValueError(f"Unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


class GanTrainer:
    """Networks, optimizers and bookkeeping of one training run"""

    def __init__(self, kind: str, cfg: TrainConfig, out_dir: Union[str, Path]):
        self.kind = kind
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.nets = build_networks(kind, cfg)
        self.optimizers = {
            name: Adam(net.named_parameters(), cfg.lr, (cfg.beta1, cfg.beta2))
            for name, net in self.nets.items()
        }
        self.epoch = 0
        self.step = 0
        self.history: list[dict[str, float]] = []

    # persistence

    def _generators(self) -> dict[str, GeneratorNet]:
        return {n: net for n, net in self.nets.items() if isinstance(net, GeneratorNet)}

    def meta(self) -> CheckpointMeta:
        return CheckpointMeta(
            kind=self.kind,
            tile_size=self.cfg.image_size,
            epoch=self.epoch,
            step=self.step,
            config=self.cfg.model_dump(mode="json"),
            config_hash=config_hash(self.cfg),
            history=self.history,
            optimizer_steps={n: opt.steps for n, opt in self.optimizers.items()},
            rng_states={
                n: g.dropout_rng.bit_generator.state for n, g in self._generators().items()
            },
            extra={"resume_hash": self.cfg.resume_hash()},
        )

    def save(self) -> Path:
        params: dict[str, np.ndarray] = {}
        optim: dict[str, np.ndarray] = {}
        for name, net in self.nets.items():
            params.update(prefixed(net.state_dict(), name))
            optim.update(prefixed(self.optimizers[name].state_tensors(), name))
        return save_checkpoint(self.out_dir, self.meta(), params, optim)

    def restore(self):
        meta, params, optim = load_checkpoint(self.out_dir)
        if meta.kind != self.kind:
            raise CheckpointError(f"{self.out_dir} holds a {meta.kind} checkpoint, not {self.kind}")
        if meta.extra.get("resume_hash") != self.cfg.resume_hash():
            raise CheckpointError(
                f"{self.out_dir} was trained with a different configuration; "
                "only the schedule may change when resuming"
            )
        for name, net in self.nets.items():
            net.load_state_dict(subset(params, name))
            self.optimizers[name].load_state(subset(optim, name), meta.optimizer_steps.get(name, 0))
        for name, g in self._generators().items():
            if name in meta.rng_states:
                g.dropout_rng.bit_generator.state = meta.rng_states[name]
        self.epoch = meta.epoch
        self.step = meta.step
        self.history = list(meta.history)
        logger.info(f"Resumed {self.kind} from epoch {self.epoch} (step {self.step})")

    # steps

    def _pix2pix_step(self, x: Tensor, y: Tensor) -> dict[str, float]:
        G, D = self.nets["G"], self.nets["D"]
        mode = self.cfg.gan_mode
        fake = G(x)

        D.zero_grad()
        d_loss = pix2pix_d_loss(D, x, y, fake, mode)
        backward(d_loss)
        self.optimizers["D"].step()

        G.zero_grad()
        g_loss = pix2pix_g_loss(D, G, x, y, self.cfg.lambda_l1, mode, fake=fake)
        backward(g_loss)
        self.optimizers["G"].step()
        return {"loss_g": g_loss.item(), "loss_d": d_loss.item()}

    def _cyclegan_step(self, x: Tensor, y: Tensor) -> dict[str, float]:
        G, F = self.nets["G"], self.nets["F"]
        D_X, D_Y = self.nets["D_X"], self.nets["D_Y"]
        mode = self.cfg.gan_mode
        fake_y = G(x)
        fake_x = F(y)

        D_X.zero_grad()
        D_Y.zero_grad()
        d_x = discriminator_loss(D_X, x, fake_x, gan_mode=mode)
        d_y = discriminator_loss(D_Y, y, fake_y, gan_mode=mode)
        backward(d_x + d_y)
        self.optimizers["D_X"].step()
        self.optimizers["D_Y"].step()

        G.zero_grad()
        F.zero_grad()
        g_total, cyc, _, _ = cyclegan_g_loss(
            G, F, D_X, D_Y, x, y, fake_y, fake_x, self.cfg.lambda_cyc, mode
        )
        backward(g_total)
        self.optimizers["G"].step()
        self.optimizers["F"].step()
        return {
            "loss_g": g_total.item(),
            "loss_d": 0.5 * (d_x.item() + d_y.item()),
            "loss_cyc": cyc.item(),
        }

    # loop

    def _budget_left(self) -> bool:
        return self.cfg.max_steps is None or self.step < self.cfg.max_steps

    def fit(
        self,
        xs: np.ndarray,
        ys: np.ndarray,
        keys: Optional[list[str]] = None,
        on_epoch: Optional[EpochCallback] = None,
    ) -> TrainResult:
        """Train on simple-style xs and target-style ys, both (n, 3, S, S) in [-1, 1]

        Paired runs require xs[i] and ys[i] to show the same tile. An unpaired
        epoch is one pass over xs, drawing ys uniformly with replacement.
        """
        if len(xs) == 0 or len(ys) == 0:
            raise EmptyDatasetError("Training needs at least one tile per domain")
        if self.kind == "pix2pix" and len(xs) != len(ys):
            raise EmptyDatasetError(f"Unpaired inputs for pix2pix: {len(xs)} vs {len(ys)} tiles")
        for G in self._generators().values():
            G.train()
        cfg = self.cfg
        bs = cfg.batch_size
        keys = keys or [f"tile-{i}" for i in range(len(xs))]
        start_epoch = self.epoch
        saved_epoch = None

        for epoch in range(self.epoch + 1, cfg.epochs + 1):
            if not self._budget_left():
                break
            rng = np.random.default_rng([cfg.seed, _SHUFFLE_STREAM, epoch])
            order = rng.permutation(len(xs))
            sums: dict[str, float] = defaultdict(float)
            steps = 0
            for start in range(0, len(order), bs):
                if not self._budget_left():
                    break
                idx = order[start : start + bs]
                x = Tensor(xs[idx])
                if self.kind == "pix2pix":
                    losses = self._pix2pix_step(x, Tensor(ys[idx]))
                else:
                    y_idx = rng.integers(len(ys), size=len(idx))
                    losses = self._cyclegan_step(x, Tensor(ys[y_idx]))
                if not all(np.isfinite(v) for v in losses.values()):
                    raise TensorError(
                        f"Non-finite loss at epoch {epoch}, step {self.step}: {losses}"
                    )
                for name, value in losses.items():
                    sums[name] += value
                steps += 1
                self.step += 1

            stats = EpochStats(
                epoch=epoch,
                steps=steps,
                loss_g=sums["loss_g"] / steps,
                loss_d=sums["loss_d"] / steps,
                loss_cyc=sums["loss_cyc"] / steps if "loss_cyc" in sums else None,
            )
            self.history.append(stats.as_row())
            self.epoch = epoch
            logger.info(f"{self.kind} {stats.progress_line()}")
            if on_epoch is not None:
                on_epoch(stats)
            if cfg.sample_count and epoch % cfg.sample_interval == 0:
                self.write_samples(xs[: cfg.sample_count], keys[: cfg.sample_count], epoch)
            if epoch % cfg.checkpoint_interval == 0:
                self.save()
                saved_epoch = epoch

        if saved_epoch != self.epoch:
            self.save()
        return TrainResult(
            checkpoint_dir=self.out_dir,
            history=list(self.history),
            steps=self.step,
            epochs_run=self.epoch - start_epoch,
        )

    def write_samples(self, xs: np.ndarray, keys: list[str], epoch: int) -> Path:
        """Generator outputs for a few training tiles under samples/epoch-<k>/"""
        G = self.nets["G"]
        folder = self.out_dir / "samples" / f"epoch-{epoch:03d}"
        G.eval()
        with no_grad():
            out = G(Tensor(xs)).data
        G.train()
        for key, arr in zip(keys, out):
            write_tile(array_to_tile(arr), folder / f"{key.replace('/', '_')}.png")
        logger.debug(f"Wrote {len(keys)} samples to {folder}")
        return folder

    def generator(self, name: str = "G") -> GeneratorNet:
        return self.nets[name]


def train(
    kind: str,
    simple: DatasetManifest,
    target: DatasetManifest,
    cfg: TrainConfig,
    out_dir: Union[str, Path],
    zoom: Optional[int] = None,
    resume: bool = False,
    on_epoch: Optional[EpochCallback] = None,
) -> TrainResult:
    """Train a pix2pix (paired) or cyclegan (unpaired) model on the train split

    Args:
        kind: "pix2pix" or "cyclegan"
        simple: Simple-style tileset (domain X / conditioning input)
        target: Target-style tileset (domain Y)
        cfg: Hyperparameters
        out_dir: Checkpoint directory
        zoom: Restrict training to one zoom level
        resume: Continue from the checkpoint in out_dir when one exists
        on_epoch: Called with the statistics of every finished epoch

    Raises:
        EmptyDatasetError: No usable tiles
        CorruptTileError: A tile file could not be decoded
        TileSizeMismatchError: Tileset size differs from cfg.image_size
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"Unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    for manifest in (simple, target):
        if manifest.tile_size != cfg.image_size:
            raise TileSizeMismatchError(
                f"{manifest.root} holds {manifest.tile_size}px tiles, "
                f"config expects {cfg.image_size}px"
            )
    if kind == "pix2pix":
        x_entries, y_entries = paired_entries(simple, target, "train", zoom)
    else:
        x_entries = unpaired_entries(simple, "train", zoom)
        y_entries = unpaired_entries(target, "train", zoom)
    logger.info(
        f"Training {kind} on {len(x_entries)} simple / {len(y_entries)} target tiles"
        f"{'' if zoom is None else f' at z{zoom}'}"
    )
    xs = load_arrays(simple, x_entries)
    ys = load_arrays(target, y_entries)

    trainer = GanTrainer(kind, cfg, out_dir)
    if resume and checkpoint_exists(out_dir):
        trainer.restore()
    return trainer.fit(xs, ys, keys=[e.key for e in x_entries], on_epoch=on_epoch)
