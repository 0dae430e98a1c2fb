"""
Adversarial, reconstruction and cycle-consistency objectives

The adversarial terms default to the log form (binary cross-entropy on
logits); gan_mode="lsgan" swaps in the least-squares form. Generators use the
non-saturating objective: their fakes are scored against the real label.
"""

from dataclasses import dataclass
from typing import Literal, Optional

from src.autograd import ops
from src.autograd.tensor import Tensor
from src.gan.networks import DiscriminatorNet, GeneratorNet

GanMode = Literal["log", "lsgan"]


def adversarial(logits: Tensor, real: bool, gan_mode: GanMode = "log") -> Tensor:
    target = 1.0 if real else 0.0
    if gan_mode == "lsgan":
        return ops.mse_loss(logits, target)
    return ops.bce_with_logits(logits, target)


def discriminator_loss(
    D: DiscriminatorNet,
    real: Tensor,
    fake: Tensor,
    condition: Optional[Tensor] = None,
    gan_mode: GanMode = "log",
) -> Tensor:
    """Mean of the real and fake verdict losses; fake is detached from its generator"""
    real_term = adversarial(D(real, condition), True, gan_mode)
    fake_term = adversarial(D(fake.detach(), condition), False, gan_mode)
    return (real_term + fake_term) * 0.5


def pix2pix_d_loss(
    D: DiscriminatorNet, x: Tensor, y_real: Tensor, y_fake: Tensor, gan_mode: GanMode = "log"
) -> Tensor:
    return discriminator_loss(D, y_real, y_fake, condition=x, gan_mode=gan_mode)


def pix2pix_g_loss(
    D: DiscriminatorNet,
    G: GeneratorNet,
    x: Tensor,
    y_real: Tensor,
    lambda_l1: float = 100.0,
    gan_mode: GanMode = "log",
    fake: Optional[Tensor] = None,
) -> Tensor:
    """adv(D(x, G(x))) + lambda_l1 * mean|y_real - G(x)|

    Pass `fake` to reuse a G(x) already computed in this step.
    """
    fake = G(x) if fake is None else fake
    adv = adversarial(D(fake, x), True, gan_mode)
    if lambda_l1 == 0:
        return adv
    return adv + ops.l1_loss(fake, y_real) * lambda_l1


@dataclass
class CycleGanLosses:
    g_total: Tensor
    d_x_loss: Tensor
    d_y_loss: Tensor
    cycle: Tensor
    adv_g: Tensor
    adv_f: Tensor

    def as_floats(self) -> dict[str, float]:
        return {
            "loss_g": self.g_total.item(),
            "loss_d": 0.5 * (self.d_x_loss.item() + self.d_y_loss.item()),
            "loss_cyc": self.cycle.item(),
        }


def cycle_loss(x: Tensor, x_cycled: Tensor, y: Tensor, y_cycled: Tensor) -> Tensor:
    """mean|F(G(x)) - x| + mean|G(F(y)) - y|"""
    return ops.l1_loss(x_cycled, x) + ops.l1_loss(y_cycled, y)


def cyclegan_g_loss(
    G: GeneratorNet,
    F: GeneratorNet,
    D_X: DiscriminatorNet,
    D_Y: DiscriminatorNet,
    x: Tensor,
    y: Tensor,
    fake_y: Tensor,
    fake_x: Tensor,
    lambda_cyc: float = 10.0,
    gan_mode: GanMode = "log",
) -> tuple[Tensor, Tensor, Tensor, Tensor]:
    """(g_total, cycle, adv_g, adv_f) for fakes G(x) and F(y) computed by the caller"""
    adv_g = adversarial(D_Y(fake_y), True, gan_mode)
    adv_f = adversarial(D_X(fake_x), True, gan_mode)
    cyc = cycle_loss(x, F(fake_y), y, G(fake_x))
    total = adv_g + adv_f
    if lambda_cyc != 0:
        total = total + cyc * lambda_cyc
    return total, cyc, adv_g, adv_f


def cyclegan_losses(
    G: GeneratorNet,
    F: GeneratorNet,
    D_X: DiscriminatorNet,
    D_Y: DiscriminatorNet,
    x: Tensor,
    y: Tensor,
    lambda_cyc: float = 10.0,
    gan_mode: GanMode = "log",
) -> CycleGanLosses:
    """All CycleGAN objectives for one (x, y) draw

    G maps X -> Y and F maps Y -> X; D_X judges domain X, D_Y domain Y.
    """
    fake_y = G(x)
    fake_x = F(y)
    g_total, cyc, adv_g, adv_f = cyclegan_g_loss(
        G, F, D_X, D_Y, x, y, fake_y, fake_x, lambda_cyc, gan_mode
    )
    return CycleGanLosses(
        g_total=g_total,
        d_x_loss=discriminator_loss(D_X, x, fake_x, gan_mode=gan_mode),
        d_y_loss=discriminator_loss(D_Y, y, fake_y, gan_mode=gan_mode),
        cycle=cyc,
        adv_g=adv_g,
        adv_f=adv_f,
    )
