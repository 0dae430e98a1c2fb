"""Pix2Pix and CycleGAN networks, objectives and training loops"""

from src.gan.checkpoint import CheckpointMeta, load_checkpoint, save_checkpoint
from src.gan.losses import cyclegan_losses, pix2pix_d_loss, pix2pix_g_loss
from src.gan.networks import DiscriminatorNet, GeneratorNet
from src.gan.trainer import MODEL_KINDS, EpochStats, GanTrainer, TrainConfig, TrainResult, train
from src.gan.transfer import load_generator, transfer

__all__ = [
    "CheckpointMeta",
    "load_checkpoint",
    "save_checkpoint",
    "cyclegan_losses",
    "pix2pix_d_loss",
    "pix2pix_g_loss",
    "DiscriminatorNet",
    "GeneratorNet",
    "MODEL_KINDS",
    "EpochStats",
    "GanTrainer",
    "TrainConfig",
    "TrainResult",
    "train",
    "load_generator",
    "transfer",
]
