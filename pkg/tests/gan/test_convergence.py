"""Long training runs on rendered tiles (excluded from the default run)"""

import numpy as np
import pytest

from src.autograd import ops
from src.autograd.tensor import Tensor, no_grad
from src.gan.trainer import GanTrainer, TrainConfig

pytestmark = [pytest.mark.slow, pytest.mark.integration]


def test_pix2pix_overfits_eight_pairs(z18_tiles, overfit_pix2pix):
    xs, ys = z18_tiles[0][:8], z18_tiles[1][:8]
    trainer, result = overfit_pix2pix
    assert result.steps == 400
    assert all(np.isfinite(v) for row in result.history for v in row.values())

    G = trainer.generator().eval()
    with no_grad():
        l1 = ops.l1_loss(G(Tensor(xs)), Tensor(ys)).item()
    assert l1 < 0.08


def test_cyclegan_cycle_reconstruction(tmp_path, z18_tiles):
    xs, ys = z18_tiles
    cfg = TrainConfig(epochs=200, ngf=8, ndf=8, seed=0, checkpoint_interval=200, sample_count=0)
    result = GanTrainer("cyclegan", cfg, tmp_path).fit(xs[:32], ys[32:])
    first, last = result.history[0]["loss_cyc"], result.history[-1]["loss_cyc"]
    # loss_cyc sums the two directions
    assert last / 2 < 0.15
    assert last < first
