"""Reverse-mode autograd over numpy arrays, with the Adam optimizer"""

from src.autograd.gradcheck import GradCheckResult, check_gradients
from src.autograd.ops import (
    bce_with_logits,
    concat_channels,
    conv2d,
    conv2d_transpose,
    dropout,
    global_avg_pool,
    instance_norm,
    l1_loss,
    leaky_relu,
    linear,
    max_pool2d,
    mse_loss,
    relu,
    sigmoid,
    tanh,
)
from src.autograd.optim import Adam, AdamState, adam_step
from src.autograd.serialization import dumps_tensors, load_tensors, loads_tensors, save_tensors
from src.autograd.tensor import (
    Tape,
    Tensor,
    backward,
    default_dtype,
    no_grad,
    precision,
    tensor,
    zeros,
)

__all__ = [
    # Core
    "Tape",
    "Tensor",
    "backward",
    "default_dtype",
    "no_grad",
    "precision",
    "tensor",
    "zeros",
    # Operators
    "bce_with_logits",
    "concat_channels",
    "conv2d",
    "conv2d_transpose",
    "dropout",
    "global_avg_pool",
    "instance_norm",
    "l1_loss",
    "leaky_relu",
    "linear",
    "max_pool2d",
    "mse_loss",
    "relu",
    "sigmoid",
    "tanh",
    # Optimizer
    "Adam",
    "AdamState",
    "adam_step",
    # Serialization
    "dumps_tensors",
    "load_tensors",
    "loads_tensors",
    "save_tensors",
    # Verification
    "GradCheckResult",
    "check_gradients",
]
