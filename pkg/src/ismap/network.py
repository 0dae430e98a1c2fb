"""
Compact map / non-map classifier network
"""

import numpy as np

from src.autograd import ops
from src.autograd.tensor import Tensor
from src.core.exceptions import TileSizeMismatchError
from src.gan.layers import Conv2d, Linear, Module

WIDTHS = (16, 32, 64)


class IsMapNet(Module):
    """Three conv3-relu-maxpool stages, global average pool, one logit

    Any input size divisible by 8 works; logits have shape (n, 1).
    """

    def __init__(self, seed: int = 0, widths: tuple[int, ...] = WIDTHS):
        rng = np.random.default_rng([seed, 4, 0])
        self.convs = []
        c_in = 3
        for width in widths:
            self.convs.append(Conv2d(c_in, width, 3, 1, 1, rng, init="he"))
            c_in = width
        self.head = Linear(c_in, 1, rng)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != 3 or x.shape[2] % 8 or x.shape[3] % 8:
            raise TileSizeMismatchError(
                f"IsMap expects (n, 3, H, W) with H, W divisible by 8, got {x.shape}"
            )
        h = x
        for conv in self.convs:
            h = ops.max_pool2d(ops.relu(conv(h)))
        return self.head(ops.global_avg_pool(h))
