"""
Generator and discriminator architectures

GeneratorNet is an encoder-decoder with skip connections; dropout in the
first decoder blocks is the generator's noise source. DiscriminatorNet is a
patch discriminator returning a grid of real/fake logits.
"""

import math
from typing import Optional

import numpy as np

from src.autograd import ops
from src.autograd.tensor import Tensor
from src.core.exceptions import TileSizeMismatchError
from src.gan.layers import Conv2d, ConvTranspose2d, Dropout, InstanceNorm2d, Module
from src.render.raster import TILE_SIZES

MAX_CHANNEL_MULT = 8


def generator_depth(size: int) -> int:
    """Down/up blocks so that the bottleneck is 4 x 4"""
    if size not in TILE_SIZES:
        raise TileSizeMismatchError(f"Unsupported tile size {size}; expected one of {TILE_SIZES}")
    return int(math.log2(size)) - 2


def _check_input(x: Tensor, channels: int, size: int, who: str):
    if x.ndim != 4 or x.shape[1] != channels or x.shape[2:] != (size, size):
        raise TileSizeMismatchError(
            f"{who} built for (n, {channels}, {size}, {size}) input, got {x.shape}"
        )


class DownBlock(Module):
    def __init__(self, c_in: int, c_out: int, rng: np.random.Generator, norm: bool = True):
        self.conv = Conv2d(c_in, c_out, 4, 2, 1, rng)
        self.norm = InstanceNorm2d(c_out) if norm else None

    def forward(self, x: Tensor) -> Tensor:
        h = self.conv(x)
        if self.norm is not None:
            h = self.norm(h)
        return ops.leaky_relu(h, 0.2)


class UpBlock(Module):
    def __init__(
        self,
        c_in: int,
        c_out: int,
        rng: np.random.Generator,
        dropout: Optional[Dropout] = None,
    ):
        self.conv = ConvTranspose2d(c_in, c_out, 4, 2, 1, rng)
        self.norm = InstanceNorm2d(c_out)
        self.dropout = dropout

    def forward(self, x: Tensor) -> Tensor:
        h = ops.relu(self.norm(self.conv(x)))
        if self.dropout is not None:
            h = self.dropout(h)
        return h


class GeneratorNet(Module):
    """(n, 3, S, S) in (-1, 1) -> (n, 3, S, S) in (-1, 1)"""

    def __init__(
        self,
        size: int = 64,
        ngf: int = 32,
        seed: int = 0,
        dropout: float = 0.5,
        dropout_blocks: int = 2,
        channels: int = 3,
        stream: int = 0,
    ):
        depth = generator_depth(size)
        self.size = size
        self.channels = channels
        init_rng = np.random.default_rng([seed, stream, 0])
        self._dropout_rng = np.random.default_rng([seed, stream, 1])

        widths = [ngf * min(2**i, MAX_CHANNEL_MULT) for i in range(depth)]
        self.down = [DownBlock(channels, widths[0], init_rng)]
        for i in range(1, depth):
            self.down.append(DownBlock(widths[i - 1], widths[i], init_rng))

        self.up = []
        for j in range(depth - 1):
            c_in = widths[depth - 1] if j == 0 else 2 * widths[depth - 1 - j]
            drop = Dropout(dropout, self._dropout_rng) if j < dropout_blocks else None
            self.up.append(UpBlock(c_in, widths[depth - 2 - j], init_rng, drop))
        self.out = ConvTranspose2d(2 * widths[0], channels, 4, 2, 1, init_rng)

    @property
    def dropout_rng(self) -> np.random.Generator:
        return self._dropout_rng

    def forward(self, x: Tensor) -> Tensor:
        _check_input(x, self.channels, self.size, "Generator")
        skips = []
        h = x
        for block in self.down:
            h = block(h)
            skips.append(h)
        skips.pop()
        for block in self.up:
            h = ops.concat_channels(block(h), skips.pop())
        return ops.tanh(self.out(h))


class DiscriminatorNet(Module):
    """Patch discriminator; conditioned on the input tile when in_channels is 6"""

    def __init__(
        self, size: int = 64, ndf: int = 32, seed: int = 0, in_channels: int = 6, stream: int = 0
    ):
        rng = np.random.default_rng([seed, stream, 2])
        generator_depth(size)
        self.size = size
        self.in_channels = in_channels
        self.blocks = [
            DownBlock(in_channels, ndf, rng, norm=False),
            DownBlock(ndf, ndf * 2, rng),
            DownBlock(ndf * 2, ndf * 4, rng),
        ]
        self.head = Conv2d(ndf * 4, 1, 4, 1, 1, rng)

    @property
    def conditional(self) -> bool:
        return self.in_channels == 6

    def forward(self, candidate: Tensor, condition: Optional[Tensor] = None) -> Tensor:
        h = candidate if condition is None else ops.concat_channels(condition, candidate)
        _check_input(h, self.in_channels, self.size, "Discriminator")
        for block in self.blocks:
            h = block(h)
        return self.head(h)


def patch_grid(size: int) -> int:
    """Side of the discriminator's logit grid for a size x size tile"""
    return size // 8 - 1
