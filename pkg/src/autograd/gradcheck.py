"""
Central-difference gradient checking

The function under test is reduced to a scalar through a fixed random
projection, then analytic gradients from backward() are compared against
(f(x + h) - f(x - h)) / 2h at a sample of input positions.

Differences are always taken in float64: float32 inputs are checked against
float64 copies of themselves, so a small step and a tight denominator floor
work at both precisions. The analytic side still runs at the inputs' dtype.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from src.autograd.tensor import Tensor, backward, no_grad, precision

DEFAULT_EPS = 1e-6
DEFAULT_FLOOR = 1e-3


def relative_error(analytic: float, numeric: float, floor: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


@dataclass
class GradCheckResult:
    max_rel_error: float = 0.0
    per_input: dict[int, float] = field(default_factory=dict)
    checked: int = 0

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error <= tolerance


def _float64_view(t: Tensor) -> Tensor:
    if t.data.dtype == np.float64:
        return t
    return Tensor(t.data.astype(np.float64), requires_grad=t.requires_grad, dtype=np.float64)


def check_gradients(
    fn: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    n_points: int = 10,
    eps: float = DEFAULT_EPS,
    floor: float = DEFAULT_FLOOR,
    seed: int = 0,
) -> GradCheckResult:
    """Compare backward() against central differences for every input that requires grad

    Args:
        fn: Function of the inputs returning a tensor of any shape
        inputs: Tensors passed positionally to fn; float64 inputs are perturbed
            in place and restored, others are left untouched
        n_points: Positions sampled per input (all positions if the input is smaller)
        eps: Finite-difference step, applied in float64
        floor: Lower bound of the relative-error denominator
        seed: Seed of the projection and of the sampled positions
    """
    rng = np.random.default_rng(seed)
    for t in inputs:
        t.data = np.ascontiguousarray(t.data)
    with no_grad():
        sample_out = fn(*inputs)
    projection = rng.standard_normal(sample_out.shape)

    wide = [_float64_view(t) for t in inputs]

    def loss_value() -> float:
        with precision("float64"), no_grad():
            out = fn(*wide)
        return float(np.sum(out.data.astype(np.float64) * projection))

    for t in inputs:
        t.grad = None
    out = fn(*inputs)
    backward((out * Tensor(projection, dtype=out.data.dtype)).sum())

    result = GradCheckResult()
    for i, t in enumerate(inputs):
        if not t.requires_grad:
            continue
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        flat = wide[i].data.reshape(-1)
        picks = rng.choice(flat.size, size=min(n_points, flat.size), replace=False)
        worst = 0.0
        for idx in picks:
            original = flat[idx]
            flat[idx] = original + eps
            up = loss_value()
            flat[idx] = original - eps
            down = loss_value()
            flat[idx] = original
            numeric = (up - down) / (2 * eps)
            err = relative_error(float(analytic.reshape(-1)[idx]), numeric, floor)
            worst = max(worst, err)
            result.checked += 1
        result.per_input[i] = worst
        result.max_rel_error = max(result.max_rel_error, worst)
    return result
