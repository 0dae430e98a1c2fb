"""
Parameterized layers over the autograd operators
"""

from typing import Iterator, Literal, Mapping, Optional

import numpy as np

from src.autograd import ops
from src.autograd.tensor import Tensor
from src.core.exceptions import CorruptCheckpointError

Init = Literal["gan", "he"]


def init_weight(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, init: Init
) -> Tensor:
    """N(0, 0.02) for the adversarial nets, He-normal for the classifier"""
    std = 0.02 if init == "gan" else float(np.sqrt(2.0 / fan_in))
    return Tensor(rng.normal(0.0, std, size=shape), requires_grad=True)


class Module:
    """Base class; parameters are discovered from attributes in definition order"""

    training: bool = True

    def __call__(self, *args, **kwargs) -> Tensor:
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs) -> Tensor:
        raise NotImplementedError

    def _children(self) -> Iterator[tuple[str, object]]:
        for name, value in vars(self).items():
            if name.startswith("_"):
                continue
            if isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    yield f"{name}.{i}", item
            else:
                yield name, value

    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        params: dict[str, Tensor] = {}
        for name, value in self._children():
            if isinstance(value, Tensor) and value.requires_grad:
                params[prefix + name] = value
            elif isinstance(value, Module):
                params.update(value.named_parameters(f"{prefix}{name}."))
        return params

    def modules(self) -> Iterator["Module"]:
        yield self
        for _, value in self._children():
            if isinstance(value, Module):
                yield from value.modules()

    def train(self, mode: bool = True) -> "Module":
        for m in self.modules():
            m.training = mode
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self):
        for p in self.named_parameters().values():
            p.grad = None

    def parameter_count(self) -> int:
        return sum(p.size for p in self.named_parameters().values())

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data for name, p in self.named_parameters().items()}

    def load_state_dict(self, tensors: Mapping[str, np.ndarray], prefix: str = ""):
        """Copy values in place; every parameter must be present with its shape"""
        for name, p in self.named_parameters().items():
            key = prefix + name
            if key not in tensors:
                raise CorruptCheckpointError(f"Missing parameter {key}")
            value = tensors[key]
            if value.shape != p.shape:
                raise CorruptCheckpointError(
                    f"Parameter {key} has shape {value.shape}, expected {p.shape}"
                )
            p.data[...] = value


class Conv2d(Module):
    def __init__(
        self,
        c_in: int,
        c_out: int,
        k: int,
        stride: int,
        pad: int,
        rng: np.random.Generator,
        init: Init = "gan",
        bias: bool = True,
    ):
        self.weight = init_weight(rng, (c_out, c_in, k, k), c_in * k * k, init)
        self.bias = Tensor(np.zeros(c_out), requires_grad=True) if bias else None
        self.stride = stride
        self.pad = pad

    def forward(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.bias, self.stride, self.pad)


class ConvTranspose2d(Module):
    def __init__(
        self,
        c_in: int,
        c_out: int,
        k: int,
        stride: int,
        pad: int,
        rng: np.random.Generator,
        init: Init = "gan",
        bias: bool = True,
    ):
        self.weight = init_weight(rng, (c_in, c_out, k, k), c_in * k * k, init)
        self.bias = Tensor(np.zeros(c_out), requires_grad=True) if bias else None
        self.stride = stride
        self.pad = pad

    def forward(self, x: Tensor) -> Tensor:
        return ops.conv2d_transpose(x, self.weight, self.bias, self.stride, self.pad)


class InstanceNorm2d(Module):
    def __init__(self, channels: int, eps: float = 1e-5):
        self.gain = Tensor(np.ones(channels), requires_grad=True)
        self.bias = Tensor(np.zeros(channels), requires_grad=True)
        self.eps = eps

    def forward(self, x: Tensor) -> Tensor:
        return ops.instance_norm(x, self.gain, self.bias, self.eps)


class Linear(Module):
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, init: Init = "he"):
        self.weight = init_weight(rng, (n_out, n_in), n_in, init)
        self.bias = Tensor(np.zeros(n_out), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return ops.linear(x, self.weight, self.bias)


class Dropout(Module):
    """Dropout drawing its masks from a generator owned by the enclosing network"""

    def __init__(self, p: float, rng: Optional[np.random.Generator] = None):
        self.p = p
        self._rng = rng

    def forward(self, x: Tensor) -> Tensor:
        return ops.dropout(x, self.p, self.training, self._rng)
