"""
Differentiable operators over NCHW tensors

Convolutions use the cross-correlation convention (no kernel flip) and are
evaluated over strided window views of the padded input. All losses reduce by
mean.
"""

from typing import Optional, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.autograd.tensor import Tensor
from src.core.exceptions import ShapeMismatchError

Target = Union[Tensor, float]


def _require(cond: bool, message: str):
    if not cond:
        raise ShapeMismatchError(message)


def _bias_grad(g: np.ndarray) -> np.ndarray:
    return g.sum(axis=(0, 2, 3))


def _scatter_windows(cols: np.ndarray, out: np.ndarray, stride: int, h: int, w: int):
    """Add cols[n, y, x, c, i, j] into out[n, c, y*s+i, x*s+j]"""
    k = cols.shape[-1]
    for i in range(k):
        for j in range(k):
            out[:, :, i : i + stride * h : stride, j : j + stride * w : stride] += cols[
                ..., i, j
            ].transpose(0, 3, 1, 2)


def _windows(x: np.ndarray, k: int, stride: int) -> np.ndarray:
    """(n, c, oh, ow, k, k) view of every k x k window at the given stride"""
    return sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::stride, ::stride]


def conv2d(
    x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, stride: int = 1, pad: int = 0
) -> Tensor:
    """out[n, o] = sum_c x[n, c] (*) weight[o, c] + bias[o]"""
    _require(x.ndim == 4, f"conv2d: input must be NCHW, got {x.shape}")
    _require(weight.ndim == 4, f"conv2d: weight must be (c_out, c_in, k, k), got {weight.shape}")
    c_out, c_in, k, k2 = weight.shape
    n, c, h, w = x.shape
    _require(k == k2, f"conv2d: kernel must be square, got {k}x{k2}")
    _require(c == c_in, f"conv2d: input has {c} channels, weight expects {c_in}")
    _require(stride >= 1 and pad >= 0, f"conv2d: bad stride {stride} / pad {pad}")
    _require(h + 2 * pad >= k and w + 2 * pad >= k, f"conv2d: kernel {k} larger than input")
    if bias is not None:
        _require(bias.shape == (c_out,), f"conv2d: bias must be ({c_out},), got {bias.shape}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = _windows(xp, k, stride)
    oh, ow = win.shape[2], win.shape[3]
    out = np.tensordot(win, weight.data, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.data[None, :, None, None]
    wdata = weight.data

    def backward(g: np.ndarray):
        dw = np.tensordot(g, win, axes=([0, 2, 3], [0, 2, 3]))
        cols = np.tensordot(g, wdata, axes=([1], [0]))
        dxp = np.zeros_like(xp)
        _scatter_windows(cols, dxp, stride, oh, ow)
        dx = dxp[:, :, pad : pad + h, pad : pad + w]
        return (dx, dw, _bias_grad(g)) if bias is not None else (dx, dw)

    parents = (x, weight, bias) if bias is not None else (x, weight)
    return Tensor.from_op(np.ascontiguousarray(out), parents, backward)


def conv2d_transpose(
    x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, stride: int = 1, pad: int = 0
) -> Tensor:
    """Transposed convolution; weight is (c_in, c_out, k, k)

    Equals the input-gradient of conv2d taken with the same weight, so
    stride 2, k 4, pad 1 doubles the spatial size.
    """
    _require(x.ndim == 4, f"conv2d_transpose: input must be NCHW, got {x.shape}")
    _require(weight.ndim == 4, f"conv2d_transpose: weight must be 4-D, got {weight.shape}")
    c_in, c_out, k, k2 = weight.shape
    n, c, h, w = x.shape
    _require(k == k2, f"conv2d_transpose: kernel must be square, got {k}x{k2}")
    _require(c == c_in, f"conv2d_transpose: input has {c} channels, weight expects {c_in}")
    _require(stride >= 1 and pad >= 0, f"conv2d_transpose: bad stride {stride} / pad {pad}")
    out_h = (h - 1) * stride - 2 * pad + k
    out_w = (w - 1) * stride - 2 * pad + k
    _require(out_h > 0 and out_w > 0, "conv2d_transpose: padding removes the whole output")
    if bias is not None:
        _require(bias.shape == (c_out,), f"conv2d_transpose: bias must be ({c_out},)")

    full = np.zeros((n, c_out, (h - 1) * stride + k, (w - 1) * stride + k), dtype=x.data.dtype)
    cols = np.tensordot(x.data, weight.data, axes=([1], [0]))
    _scatter_windows(cols, full, stride, h, w)
    out = full[:, :, pad : pad + out_h, pad : pad + out_w]
    if bias is not None:
        out = out + bias.data[None, :, None, None]
    xdata, wdata = x.data, weight.data

    def backward(g: np.ndarray):
        gfull = np.pad(g, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        win = _windows(gfull, k, stride)
        dx = np.tensordot(win, wdata, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
        dw = np.tensordot(xdata, win, axes=([0, 2, 3], [0, 2, 3]))
        return (dx, dw, _bias_grad(g)) if bias is not None else (dx, dw)

    parents = (x, weight, bias) if bias is not None else (x, weight)
    return Tensor.from_op(np.ascontiguousarray(out), parents, backward)


def instance_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-(n, c) plane normalization followed by a per-channel affine map"""
    _require(x.ndim == 4, f"instance_norm: input must be NCHW, got {x.shape}")
    c = x.shape[1]
    _require(gain.shape == (c,) and bias.shape == (c,), "instance_norm: gain/bias must be (c,)")
    axes = (2, 3)
    mu = x.data.mean(axis=axes, keepdims=True)
    centered = x.data - mu
    inv = 1.0 / np.sqrt((centered**2).mean(axis=axes, keepdims=True) + eps)
    xhat = centered * inv
    gdata = gain.data
    out = xhat * gdata[None, :, None, None] + bias.data[None, :, None, None]

    def backward(g: np.ndarray):
        dgain = (g * xhat).sum(axis=(0, 2, 3))
        dbias = g.sum(axis=(0, 2, 3))
        dxhat = g * gdata[None, :, None, None]
        dx = inv * (
            dxhat
            - dxhat.mean(axis=axes, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=axes, keepdims=True)
        )
        return dx, dgain, dbias

    return Tensor.from_op(out, (x, gain, bias), backward)


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    positive = x.data > 0
    scale = np.where(positive, 1.0, slope).astype(x.data.dtype)
    return Tensor.from_op(x.data * scale, (x,), lambda g: (g * scale,))


def relu(x: Tensor) -> Tensor:
    mask = (x.data > 0).astype(x.data.dtype)
    return Tensor.from_op(x.data * mask, (x,), lambda g: (g * mask,))


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)
    return Tensor.from_op(out, (x,), lambda g: (g * (1.0 - out * out),))


def _sigmoid(v: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -v)).astype(v.dtype)


def sigmoid(x: Tensor) -> Tensor:
    out = _sigmoid(x.data)
    return Tensor.from_op(out, (x,), lambda g: (g * out * (1.0 - out),))


def dropout(
    x: Tensor, p: float, training: bool, rng: Optional[np.random.Generator] = None
) -> Tensor:
    """Inverted dropout; identity when not training or p == 0"""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in training mode needs a random generator")
    mask = ((rng.random(x.shape) >= p) / (1.0 - p)).astype(x.data.dtype)
    return Tensor.from_op(x.data * mask, (x,), lambda g: (g * mask,))


def concat_channels(a: Tensor, b: Tensor) -> Tensor:
    _require(a.ndim == 4 and b.ndim == 4, "concat_channels: inputs must be NCHW")
    _require(
        a.shape[0] == b.shape[0] and a.shape[2:] == b.shape[2:],
        f"concat_channels: shapes {a.shape} and {b.shape} differ outside the channel axis",
    )
    split = a.shape[1]
    out = np.concatenate([a.data, b.data], axis=1)
    return Tensor.from_op(out, (a, b), lambda g: (g[:, :split], g[:, split:]))


def _pair(a: Tensor, b: Target, op: str) -> np.ndarray:
    if isinstance(b, Tensor):
        _require(a.shape == b.shape, f"{op}: shapes {a.shape} and {b.shape} differ")
        return b.data
    return np.full(a.shape, b, dtype=a.data.dtype)


def l1_loss(a: Tensor, b: Target) -> Tensor:
    """mean |a - b|"""
    bdata = _pair(a, b, "l1_loss")
    diff = a.data - bdata
    n = diff.size
    sign = np.sign(diff)
    out = np.asarray(np.abs(diff).mean())
    if isinstance(b, Tensor):
        return Tensor.from_op(out, (a, b), lambda g: (g * sign / n, -g * sign / n))
    return Tensor.from_op(out, (a,), lambda g: (g * sign / n,))


def mse_loss(a: Tensor, b: Target) -> Tensor:
    """mean (a - b)^2"""
    bdata = _pair(a, b, "mse_loss")
    diff = a.data - bdata
    n = diff.size
    out = np.asarray((diff * diff).mean())
    if isinstance(b, Tensor):
        return Tensor.from_op(out, (a, b), lambda g: (2 * g * diff / n, -2 * g * diff / n))
    return Tensor.from_op(out, (a,), lambda g: (2 * g * diff / n,))


def bce_with_logits(logits: Tensor, targets: Target) -> Tensor:
    """mean of max(l, 0) - l*t + log(1 + exp(-|l|))"""
    t = _pair(logits, targets, "bce_with_logits")
    l = logits.data
    n = l.size
    per_item = np.maximum(l, 0) - l * t + np.log1p(np.exp(-np.abs(l)))
    out = np.asarray(per_item.mean())

    def backward(g: np.ndarray):
        dl = g * (_sigmoid(l) - t) / n
        if isinstance(targets, Tensor):
            return dl, -g * l / n
        return (dl,)

    parents = (logits, targets) if isinstance(targets, Tensor) else (logits,)
    return Tensor.from_op(out, parents, backward)


def max_pool2d(x: Tensor) -> Tensor:
    """2x2 max pooling with stride 2; ties route the gradient to the first maximum"""
    _require(x.ndim == 4, f"max_pool2d: input must be NCHW, got {x.shape}")
    n, c, h, w = x.shape
    _require(h % 2 == 0 and w % 2 == 0, f"max_pool2d: spatial size {h}x{w} must be even")
    blocks = x.data.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    blocks = blocks.reshape(n, c, h // 2, w // 2, 4)
    idx = blocks.argmax(axis=-1)[..., None]
    out = np.take_along_axis(blocks, idx, axis=-1)[..., 0]

    def backward(g: np.ndarray):
        gb = np.zeros_like(blocks)
        np.put_along_axis(gb, idx, g[..., None], axis=-1)
        gb = gb.reshape(n, c, h // 2, w // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5)
        return (gb.reshape(n, c, h, w),)

    return Tensor.from_op(out, (x,), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """(n, c, h, w) -> (n, c)"""
    _require(x.ndim == 4, f"global_avg_pool: input must be NCHW, got {x.shape}")
    n, c, h, w = x.shape
    out = x.data.mean(axis=(2, 3))
    return Tensor.from_op(
        out, (x,), lambda g: (np.broadcast_to(g[:, :, None, None] / (h * w), x.shape).copy(),)
    )


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """(n, in) x (out, in)^T + (out,)"""
    _require(x.ndim == 2, f"linear: input must be (n, features), got {x.shape}")
    _require(
        weight.ndim == 2 and weight.shape[1] == x.shape[1],
        f"linear: weight {weight.shape} does not fit input {x.shape}",
    )
    if bias is not None:
        _require(bias.shape == (weight.shape[0],), f"linear: bias must be ({weight.shape[0]},)")
    xdata, wdata = x.data, weight.data
    out = xdata @ wdata.T
    if bias is not None:
        out = out + bias.data

    def backward(g: np.ndarray):
        dx = g @ wdata
        dw = g.T @ xdata
        return (dx, dw, g.sum(axis=0)) if bias is not None else (dx, dw)

    parents = (x, weight, bias) if bias is not None else (x, weight)
    return Tensor.from_op(out, parents, backward)
