"""Tests for the generator and discriminator architectures"""

import numpy as np
import pytest

from src.autograd.tensor import Tensor, no_grad
from src.core.exceptions import TileSizeMismatchError
from src.gan.networks import DiscriminatorNet, GeneratorNet, generator_depth, patch_grid


def _batch(n: int = 1, channels: int = 3, size: int = 64, seed: int = 0) -> Tensor:
    rng = np.random.default_rng(seed)
    return Tensor(rng.uniform(-1, 1, size=(n, channels, size, size)))


@pytest.mark.parametrize("size,depth", [(64, 4), (128, 5), (256, 6)])
def test_generator_depth(size, depth):
    assert generator_depth(size) == depth


def test_unsupported_size():
    with pytest.raises(TileSizeMismatchError):
        generator_depth(100)


class TestGenerator:
    def test_output_shape_and_range(self):
        G = GeneratorNet(64, ngf=4)
        out = G(_batch(2)).data
        assert out.shape == (2, 3, 64, 64)
        assert np.all(np.abs(out) < 1.0)

    def test_block_layout(self):
        G = GeneratorNet(64, ngf=4)
        assert len(G.down) == 4
        assert len(G.up) == 3
        assert [b.dropout is not None for b in G.up] == [True, True, False]
        # bottleneck channels: 4 * min(2**3, 8)
        assert G.down[-1].conv.weight.shape == (32, 16, 4, 4)
        assert G.out.weight.shape == (8, 3, 4, 4)

    def test_channel_multiplier_caps_at_eight(self):
        G = GeneratorNet(256, ngf=2)
        widths = [b.conv.weight.shape[0] for b in G.down]
        assert widths == [2, 4, 8, 16, 16, 16]

    def test_wrong_input_size(self):
        G = GeneratorNet(64, ngf=4)
        with pytest.raises(TileSizeMismatchError):
            G(_batch(size=128))

    def test_seeded_initialization(self):
        a = GeneratorNet(64, ngf=4, seed=1).state_dict()
        b = GeneratorNet(64, ngf=4, seed=1).state_dict()
        c = GeneratorNet(64, ngf=4, seed=1, stream=1).state_dict()
        assert all(np.array_equal(a[k], b[k]) for k in a)
        assert not np.array_equal(a["down.0.conv.weight"], c["down.0.conv.weight"])

    def test_eval_mode_is_deterministic(self):
        G = GeneratorNet(64, ngf=4).eval()
        x = _batch()
        with no_grad():
            np.testing.assert_array_equal(G(x).data, G(x).data)

    def test_dropout_varies_outputs_in_training(self):
        G = GeneratorNet(64, ngf=4)
        x = _batch()
        assert not np.array_equal(G(x).data, G(x).data)

    def test_no_dropout(self):
        G = GeneratorNet(64, ngf=4, dropout=0.0)
        x = _batch()
        np.testing.assert_array_equal(G(x).data, G(x).data)


class TestDiscriminator:
    def test_patch_grid(self):
        D = DiscriminatorNet(64, ndf=4, in_channels=3)
        out = D(_batch()).data
        assert out.shape == (1, 1, 7, 7)
        assert patch_grid(64) == 7
        assert patch_grid(128) == 15

    def test_conditional_concatenates_input(self):
        D = DiscriminatorNet(64, ndf=4)
        assert D.conditional
        out = D(_batch(seed=1), condition=_batch(seed=2))
        assert out.shape == (1, 1, 7, 7)

    def test_conditional_needs_condition(self):
        D = DiscriminatorNet(64, ndf=4)
        with pytest.raises(TileSizeMismatchError):
            D(_batch())

    def test_first_block_has_no_norm(self):
        D = DiscriminatorNet(64, ndf=4, in_channels=3)
        assert D.blocks[0].norm is None
        assert D.blocks[1].norm is not None
