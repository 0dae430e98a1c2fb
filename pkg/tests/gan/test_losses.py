"""Tests for the adversarial, reconstruction and cycle objectives"""

import math

import numpy as np
import pytest

from src.autograd.tensor import Tensor, backward
from src.gan.layers import Module
from src.gan.losses import (
    adversarial,
    cycle_loss,
    cyclegan_g_loss,
    cyclegan_losses,
    discriminator_loss,
    pix2pix_d_loss,
    pix2pix_g_loss,
)
from src.gan.networks import DiscriminatorNet, GeneratorNet

LN2 = math.log(2.0)


class Identity(Module):
    def forward(self, x: Tensor) -> Tensor:
        return x


def _tile(seed: int) -> Tensor:
    return Tensor(np.random.default_rng(seed).uniform(-1, 1, size=(1, 3, 64, 64)))


def _blind(in_channels: int) -> DiscriminatorNet:
    """A discriminator whose logits are all zero"""
    D = DiscriminatorNet(64, ndf=4, in_channels=in_channels)
    D.head.weight.data[...] = 0
    D.head.bias.data[...] = 0
    return D


def _bce(logit: float, target: float) -> float:
    p = 1 / (1 + math.exp(-logit))
    return -(target * math.log(p) + (1 - target) * math.log(1 - p))


class TestAdversarial:
    def test_matches_scalar_bce(self):
        logits = np.array([[-2.0, -0.3], [0.4, 3.1]])
        real = adversarial(Tensor(logits), True).item()
        fake = adversarial(Tensor(logits), False).item()
        assert real == pytest.approx(np.mean([_bce(v, 1.0) for v in logits.flat]), abs=1e-6)
        assert fake == pytest.approx(np.mean([_bce(v, 0.0) for v in logits.flat]), abs=1e-6)

    def test_lsgan(self):
        logits = Tensor(np.array([0.5, -0.5]))
        assert adversarial(logits, True, "lsgan").item() == pytest.approx((0.25 + 2.25) / 2)
        assert adversarial(logits, False, "lsgan").item() == pytest.approx(0.25)


class TestPix2Pix:
    def test_blind_discriminator_loss_is_ln2(self):
        x, y = _tile(0), _tile(1)
        fake = GeneratorNet(64, ngf=4)(x)
        loss = pix2pix_d_loss(_blind(6), x, y, fake)
        assert loss.item() == pytest.approx(LN2, abs=1e-6)

    def test_blind_lsgan_discriminator_loss(self):
        x, y = _tile(0), _tile(1)
        loss = pix2pix_d_loss(_blind(6), x, y, _tile(2), gan_mode="lsgan")
        assert loss.item() == pytest.approx(0.5, abs=1e-6)

    def test_generator_loss_with_perfect_output(self):
        x, y = _tile(0), _tile(1)
        loss = pix2pix_g_loss(_blind(6), None, x, y, fake=y)
        assert loss.item() == pytest.approx(LN2, abs=1e-6)

    def test_generator_loss_arithmetic(self):
        x, y = _tile(0), _tile(1)
        fake = Tensor(y.data + np.float32(0.01))
        loss = pix2pix_g_loss(_blind(6), None, x, y, lambda_l1=100.0, fake=fake)
        assert loss.item() == pytest.approx(LN2 + 1.0, abs=1e-4)

    def test_zero_lambda_is_pure_adversarial(self):
        x, y = _tile(0), _tile(1)
        D = DiscriminatorNet(64, ndf=4)
        G = GeneratorNet(64, ngf=4, dropout=0.0)
        fake = G(x)
        loss = pix2pix_g_loss(D, G, x, y, lambda_l1=0.0, fake=fake)
        assert loss.item() == pytest.approx(adversarial(D(fake, x), True).item(), abs=1e-6)

    def test_discriminator_update_leaves_generator_alone(self):
        x, y = _tile(0), _tile(1)
        G = GeneratorNet(64, ngf=4)
        D = DiscriminatorNet(64, ndf=4)
        backward(pix2pix_d_loss(D, x, y, G(x)))
        assert all(p.grad is None for p in G.named_parameters().values())
        assert all(p.grad is not None for p in D.named_parameters().values())

    def test_generator_loss_reaches_generator(self):
        x, y = _tile(0), _tile(1)
        G = GeneratorNet(64, ngf=4)
        backward(pix2pix_g_loss(DiscriminatorNet(64, ndf=4), G, x, y))
        assert all(p.grad is not None for p in G.named_parameters().values())


class TestCycleGan:
    def test_identity_generators_have_no_cycle_loss(self):
        x, y = _tile(0), _tile(1)
        out = cyclegan_losses(Identity(), Identity(), _blind(3), _blind(3), x, y)
        assert out.cycle.item() == 0.0
        adv_sum = out.adv_g.item() + out.adv_f.item()
        assert out.g_total.item() == pytest.approx(adv_sum, abs=1e-6)
        assert out.g_total.item() == pytest.approx(2 * LN2, abs=1e-6)
        assert out.d_x_loss.item() == pytest.approx(LN2, abs=1e-6)

    def test_as_floats(self):
        x, y = _tile(0), _tile(1)
        floats = cyclegan_losses(Identity(), Identity(), _blind(3), _blind(3), x, y).as_floats()
        assert set(floats) == {"loss_g", "loss_d", "loss_cyc"}
        assert floats["loss_d"] == pytest.approx(LN2, abs=1e-6)

    def test_cycle_loss_sums_both_directions(self):
        x = Tensor(np.zeros((1, 3, 2, 2)))
        y = Tensor(np.ones((1, 3, 2, 2)))
        x_cycled = Tensor(np.full((1, 3, 2, 2), 0.5))
        y_cycled = Tensor(np.full((1, 3, 2, 2), 0.75))
        loss = cycle_loss(x, x_cycled, y, y_cycled)
        assert loss.item() == pytest.approx(0.5 + 0.25)

    def test_lambda_weights_cycle_term(self):
        x, y = _tile(0), _tile(1)
        G = GeneratorNet(64, ngf=4, dropout=0.0)
        F = GeneratorNet(64, ngf=4, dropout=0.0, stream=1)
        D_X, D_Y = _blind(3), _blind(3)
        fake_y, fake_x = G(x), F(y)
        total0, cyc, adv_g, adv_f = cyclegan_g_loss(G, F, D_X, D_Y, x, y, fake_y, fake_x, 0.0)
        total10, *_ = cyclegan_g_loss(G, F, D_X, D_Y, x, y, fake_y, fake_x, 10.0)
        assert cyc.item() > 0
        assert total0.item() == pytest.approx(adv_g.item() + adv_f.item(), abs=1e-6)
        assert total10.item() == pytest.approx(total0.item() + 10 * cyc.item(), rel=1e-5)

    def test_discriminator_loss_detaches_fake(self):
        G = GeneratorNet(64, ngf=4)
        D = DiscriminatorNet(64, ndf=4, in_channels=3)
        backward(discriminator_loss(D, _tile(1), G(_tile(0))))
        assert all(p.grad is None for p in G.named_parameters().values())
