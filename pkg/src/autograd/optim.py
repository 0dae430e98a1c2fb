"""
Adam optimizer with bias correction
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from src.autograd.tensor import Tensor


@dataclass
class AdamState:
    """Moments per parameter name plus the shared step count"""

    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.t < 0:
            raise ValueError(f"step count must be >= 0, got {self.t}")


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
):
    """Update every array in params in place; a missing gradient counts as zero"""
    state.t += 1
    c1 = 1.0 - state.beta1**state.t
    c2 = 1.0 - state.beta2**state.t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(p)
            v = state.v[name] = np.zeros_like(p)
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


class Adam:
    """Adam over a set of named leaf tensors"""

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 2e-4,
        betas: tuple[float, float] = (0.5, 0.999),
        eps: float = 1e-8,
    ):
        self.params = dict(params)
        self.state = AdamState(lr=lr, beta1=betas[0], beta2=betas[1], eps=eps)

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def step(self):
        adam_step(
            {name: p.data for name, p in self.params.items()},
            {name: p.grad for name, p in self.params.items()},
            self.state,
        )

    @property
    def steps(self) -> int:
        return self.state.t

    def state_tensors(self) -> dict[str, np.ndarray]:
        """Moments keyed `m.<name>` / `v.<name>`, for the checkpoint blob"""
        out: dict[str, np.ndarray] = {}
        for name in self.params:
            if name in self.state.m:
                out[f"m.{name}"] = self.state.m[name]
                out[f"v.{name}"] = self.state.v[name]
        return out

    def load_state(self, tensors: Mapping[str, np.ndarray], t: int):
        self.state.t = t
        self.state.m = {}
        self.state.v = {}
        for name, p in self.params.items():
            if f"m.{name}" in tensors:
                self.state.m[name] = np.array(tensors[f"m.{name}"], dtype=p.data.dtype)
                self.state.v[name] = np.array(tensors[f"v.{name}"], dtype=p.data.dtype)
