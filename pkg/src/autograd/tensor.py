"""
Reverse-mode automatic differentiation over numpy arrays

A Tensor produced by an operation remembers its parents and a backward
function mapping the output gradient to one gradient per parent. backward()
records the graph reachable from a scalar loss on a Tape, walks it in reverse
topological order and accumulates gradients on the leaf tensors.
"""

import threading
from contextlib import contextmanager
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from src.core.exceptions import NonScalarLossError, ShapeMismatchError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
Scalar = Union[int, float]

_DTYPES = {"float32": np.float32, "float64": np.float64}
_local = threading.local()


def default_dtype() -> type:
    return getattr(_local, "dtype", np.float32)


def is_grad_enabled() -> bool:
    return getattr(_local, "grad_enabled", True)


@contextmanager
def precision(name: str) -> Iterator[None]:
    """Create tensors in float32 (training) or float64 (gradient verification)"""
    if name not in _DTYPES:
        raise ValueError(f"Unknown precision {name!r}; expected one of {sorted(_DTYPES)}")
    previous = default_dtype()
    _local.dtype = _DTYPES[name]
    try:
        yield
    finally:
        _local.dtype = previous


@contextmanager
def no_grad() -> Iterator[None]:
    """Operations inside the block record no graph"""
    previous = is_grad_enabled()
    _local.grad_enabled = False
    try:
        yield
    finally:
        _local.grad_enabled = previous


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "name", "_parents", "_backward", "_retain")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        name: Optional[str] = None,
        dtype: Optional[type] = None,
    ):
        self.data: np.ndarray = np.asarray(data, dtype=dtype or default_dtype())
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None
        self._retain = False

    @classmethod
    def from_op(
        cls, data: np.ndarray, parents: Sequence["Tensor"], backward: BackwardFn
    ) -> "Tensor":
        """Result of an operation; records the graph only when a parent needs it"""
        dtype = parents[0].data.dtype if parents else default_dtype()
        out = cls(data, dtype=dtype)
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{label})"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        """Same values, no history"""
        return Tensor(self.data, dtype=self.data.dtype)

    def retain_grad(self) -> "Tensor":
        """Keep the gradient of this intermediate tensor after backward()"""
        self._retain = True
        return self

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    # arithmetic used to compose losses
    def _check_same_shape(self, other: "Tensor", op: str):
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{op}: shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: Union["Tensor", Scalar]) -> "Tensor":
        if isinstance(other, Tensor):
            self._check_same_shape(other, "add")
            return Tensor.from_op(self.data + other.data, (self, other), lambda g: (g, g))
        return Tensor.from_op(self.data + other, (self,), lambda g: (g,))

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        return Tensor.from_op(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other: Union["Tensor", Scalar]) -> "Tensor":
        if isinstance(other, Tensor):
            self._check_same_shape(other, "sub")
            return Tensor.from_op(self.data - other.data, (self, other), lambda g: (g, -g))
        return Tensor.from_op(self.data - other, (self,), lambda g: (g,))

    def __rsub__(self, other: Scalar) -> "Tensor":
        return Tensor.from_op(other - self.data, (self,), lambda g: (-g,))

    def __mul__(self, other: Union["Tensor", Scalar]) -> "Tensor":
        if isinstance(other, Tensor):
            self._check_same_shape(other, "mul")
            a, b = self.data, other.data
            return Tensor.from_op(a * b, (self, other), lambda g: (g * b, g * a))
        return Tensor.from_op(self.data * other, (self,), lambda g: (g * other,))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Tensor":
        return self * (1.0 / other)

    def sum(self) -> "Tensor":
        shape = self.shape
        return Tensor.from_op(
            np.asarray(self.data.sum()), (self,), lambda g: (np.broadcast_to(g, shape).copy(),)
        )

    def mean(self) -> "Tensor":
        n = self.size
        shape = self.shape
        return Tensor.from_op(
            np.asarray(self.data.mean()),
            (self,),
            lambda g: (np.broadcast_to(g / n, shape).copy(),),
        )


class Tape:
    """Graph reachable from a loss, parents ordered before children"""

    def __init__(self, root: Tensor):
        self.root = root
        self.nodes = self._topological(root)

    @staticmethod
    def _topological(root: Tensor) -> list[Tensor]:
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def __len__(self) -> int:
        return len(self.nodes)

    def run(self, seed: np.ndarray):
        grads: dict[int, np.ndarray] = {id(self.root): seed}
        for node in reversed(self.nodes):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf or node._retain:
                node.grad = g.copy() if node.grad is None else node.grad + g
            if node.is_leaf:
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                pg = np.asarray(pg, dtype=parent.data.dtype)
                if pg.shape != parent.shape:
                    raise ShapeMismatchError(
                        f"Gradient shape {pg.shape} does not match tensor shape {parent.shape}"
                    )
                key = id(parent)
                grads[key] = grads[key] + pg if key in grads else pg


def backward(loss: Tensor):
    """Accumulate d(loss)/d(leaf) into .grad of every leaf that requires it"""
    if loss.size != 1:
        raise NonScalarLossError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    Tape(loss).run(np.ones_like(loss.data))


def tensor(data, requires_grad: bool = False, name: Optional[str] = None) -> Tensor:
    return Tensor(data, requires_grad=requires_grad, name=name)


def zeros(shape: tuple[int, ...], requires_grad: bool = False) -> Tensor:
    return Tensor(np.zeros(shape, dtype=default_dtype()), requires_grad=requires_grad)
