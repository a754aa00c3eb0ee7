"""Differentiable whole-tensor operations used by the synthesis networks.

Each function takes/returns :class:`~melsynth.nn_core.tensor.Tensor` and
registers a backward closure on the tape. Constants (masks, targets,
positional tables) may be passed as plain numpy arrays or scalars; they
never receive gradients.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .tensor import Tensor, as_tensor


def _unbroadcast(grad, shape):
    """Sum `grad` down to `shape`, inverting numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# elementwise arithmetic
# ---------------------------------------------------------------------------

def add(a, b):
    a, b = as_tensor(a, like=b if isinstance(b, Tensor) else None), as_tensor(b, like=a if isinstance(a, Tensor) else None)
    out = a.data + b.data

    def backward(g):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g, b.data.shape))

    return Tensor.from_op(out, (a, b), backward)


def sub(a, b):
    a, b = as_tensor(a, like=b if isinstance(b, Tensor) else None), as_tensor(b, like=a if isinstance(a, Tensor) else None)
    out = a.data - b.data

    def backward(g):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b.accumulate_grad(-_unbroadcast(g, b.data.shape))

    return Tensor.from_op(out, (a, b), backward)


def mul(a, b):
    a, b = as_tensor(a, like=b if isinstance(b, Tensor) else None), as_tensor(b, like=a if isinstance(a, Tensor) else None)
    out = a.data * b.data

    def backward(g):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g * a.data, b.data.shape))

    return Tensor.from_op(out, (a, b), backward)


def div(a, b):
    a, b = as_tensor(a, like=b if isinstance(b, Tensor) else None), as_tensor(b, like=a if isinstance(a, Tensor) else None)
    out = a.data / b.data

    def backward(g):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g / b.data, a.data.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return Tensor.from_op(out, (a, b), backward)


# ---------------------------------------------------------------------------
# activations and pointwise maps
# ---------------------------------------------------------------------------

def relu(x):
    out = np.maximum(x.data, 0)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * (x.data > 0))

    return Tensor.from_op(out, (x,), backward)


def sigmoid(x):
    out = 1.0 / (1.0 + np.exp(-x.data))

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * out * (1.0 - out))

    return Tensor.from_op(out, (x,), backward)


def tanh(x):
    out = np.tanh(x.data)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * (1.0 - out * out))

    return Tensor.from_op(out, (x,), backward)


def exp(x):
    out = np.exp(x.data)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * out)

    return Tensor.from_op(out, (x,), backward)


def log(x):
    out = np.log(x.data)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g / x.data)

    return Tensor.from_op(out, (x,), backward)


def sqrt(x):
    out = np.sqrt(x.data)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * 0.5 / out)

    return Tensor.from_op(out, (x,), backward)


def abs_(x):
    out = np.abs(x.data)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * np.sign(x.data))

    return Tensor.from_op(out, (x,), backward)


def huber(x, delta=1.0):
    """Elementwise Huber of a residual: quadratic inside |x|<=delta, linear outside."""
    absx = np.abs(x.data)
    small = absx <= delta
    out = np.where(small, 0.5 * x.data * x.data, delta * (absx - 0.5 * delta))
    out = out.astype(x.data.dtype)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(g * np.where(small, x.data, delta * np.sign(x.data)).astype(x.data.dtype))

    return Tensor.from_op(out, (x,), backward)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

def sum(x, axis=None, keepdims=False):  # noqa: A001 - mirrors numpy naming
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if not x.requires_grad:
            return
        if axis is None:
            x.accumulate_grad(np.broadcast_to(g, x.data.shape))
            return
        if not keepdims:
            axes = axis if isinstance(axis, tuple) else (axis,)
            g = np.expand_dims(g, tuple(a % x.data.ndim for a in axes))
        x.accumulate_grad(np.broadcast_to(g, x.data.shape))

    return Tensor.from_op(out, (x,), backward)


def mean(x, axis=None, keepdims=False):
    if axis is None:
        n = x.data.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        n = 1
        for a in axes:
            n *= x.data.shape[a]
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / n)


# ---------------------------------------------------------------------------
# shape ops
# ---------------------------------------------------------------------------

def transpose_last2(x):
    out = np.swapaxes(x.data, -1, -2)

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(np.swapaxes(g, -1, -2))

    return Tensor.from_op(out, (x,), backward)


def narrow(x, axis, start, length):
    """Contiguous slice along one axis, differentiable (scatter on backward)."""
    idx = [slice(None)] * x.data.ndim
    idx[axis] = slice(start, start + length)
    idx = tuple(idx)
    out = x.data[idx]

    def backward(g):
        if x.requires_grad:
            full = np.zeros_like(x.data)
            full[idx] = g
            x.accumulate_grad(full)

    return Tensor.from_op(out, (x,), backward)


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def matmul(a, b):
    """Matrix product; both operands 2-d, or both 3-d (batched)."""
    out = np.matmul(a.data, b.data)

    def backward(g):
        if a.requires_grad:
            a.accumulate_grad(np.matmul(g, np.swapaxes(b.data, -1, -2)))
        if b.requires_grad:
            b.accumulate_grad(np.matmul(np.swapaxes(a.data, -1, -2), g))

    return Tensor.from_op(out, (a, b), backward)


def linear(x, weight, bias=None):
    """Per-time-step affine map on (batch, channels, time) input.

    weight: (out_channels, in_channels); bias: (out_channels,).
    """
    if x.data.shape[1] != weight.data.shape[1]:
        raise ValueError(
            f"linear channel mismatch: input has {x.data.shape[1]}, weight expects {weight.data.shape[1]}"
        )
    out = np.matmul(weight.data, x.data)
    if bias is not None:
        out += bias.data[:, None]

    def backward(g):
        if x.requires_grad:
            x.accumulate_grad(np.matmul(weight.data.T, g))
        if weight.requires_grad:
            weight.accumulate_grad(np.matmul(g, np.swapaxes(x.data, 1, 2)).sum(axis=0))
        if bias is not None and bias.requires_grad:
            bias.accumulate_grad(g.sum(axis=(0, 2)))

    parents = (x, weight) if bias is None else (x, weight, bias)
    return Tensor.from_op(out, parents, backward)


def embedding(weight, ids):
    """Lookup id sequence (batch, n) -> (batch, dim, n)."""
    ids = np.asarray(ids)
    vocab = weight.data.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab):
        bad = int(ids.min()) if ids.min() < 0 else int(ids.max())
        raise IndexError(f"embedding id {bad} outside vocabulary of size {vocab}")
    out = weight.data[ids].transpose(0, 2, 1)

    def backward(g):
        if weight.requires_grad:
            gw = np.zeros_like(weight.data)
            np.add.at(gw, ids, g.transpose(0, 2, 1))
            weight.accumulate_grad(gw)

    return Tensor.from_op(out, (weight,), backward)


def gather_time(x, indices):
    """Re-index the time axis: out[b, :, t] = x[b, :, indices[b, t]].

    Used to expand per-phoneme encodings to frame rate; gradients scatter-add
    back so repeated frames all contribute to their source phoneme.
    """
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= x.data.shape[2]):
        raise IndexError("gather_time index outside input time range")
    batch_ix = np.arange(x.data.shape[0])[:, None]
    xt = x.data.transpose(0, 2, 1)
    out = xt[batch_ix, idx].transpose(0, 2, 1)

    def backward(g):
        if x.requires_grad:
            gxt = np.zeros_like(xt)
            np.add.at(gxt, (batch_ix, idx), g.transpose(0, 2, 1))
            x.accumulate_grad(gxt.transpose(0, 2, 1))

    return Tensor.from_op(out, (x,), backward)


def softmax(x, axis):
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        if x.requires_grad:
            gy = g * out
            x.accumulate_grad(gy - out * gy.sum(axis=axis, keepdims=True))

    return Tensor.from_op(out, (x,), backward)


# ---------------------------------------------------------------------------
# convolutions
# ---------------------------------------------------------------------------

# forward-call counter; lets tests assert a synthesis pass runs a fixed number
# of convolutions regardless of output length (no per-frame loops)
CONV_CALLS = 0


def conv1d(x, weight, bias, dilation=1, causal=False):
    """Dilated 1D convolution over (batch, channels, time), length-preserving.

    causal: left-pad (kernel-1)*dilation zeros so output t sees inputs <= t.
    non-causal: symmetric zero padding.
    """
    global CONV_CALLS
    CONV_CALLS += 1
    if x.data.shape[1] != weight.data.shape[1]:
        raise ValueError(
            f"conv1d channel mismatch: input has {x.data.shape[1]}, weight expects {weight.data.shape[1]}"
        )
    if not np.all(np.isfinite(weight.data)):
        raise ValueError("conv1d weights contain non-finite values")
    ksize = weight.data.shape[2]
    span = (ksize - 1) * dilation
    if causal:
        pad_left, pad_right = span, 0
    else:
        pad_left = span // 2
        pad_right = span - pad_left
    out_time = x.data.shape[2]
    xpad = np.pad(x.data, ((0, 0), (0, 0), (pad_left, pad_right)))
    out = kernels.conv1d_forward(xpad, weight.data, bias.data, dilation, out_time)

    def backward(g):
        g = np.ascontiguousarray(g)
        if weight.requires_grad:
            weight.accumulate_grad(kernels.conv1d_grad_weight(g, xpad, dilation, ksize))
        if bias.requires_grad:
            bias.accumulate_grad(g.sum(axis=(0, 2)))
        if x.requires_grad:
            gxpad = kernels.conv1d_grad_input(g, weight.data, dilation, xpad.shape[2])
            x.accumulate_grad(gxpad[:, :, pad_left:pad_left + out_time])

    return Tensor.from_op(out, (x, weight, bias), backward)


def filter1d_valid(x, kernel, axis):
    """Valid-mode correlation with a fixed 1D kernel along `axis` (no parameters)."""
    kernel = np.asarray(kernel, dtype=x.data.dtype)
    ksize = kernel.shape[0]
    win = np.lib.stride_tricks.sliding_window_view(x.data, ksize, axis=axis)
    out = win @ kernel  # window axis is last after sliding_window_view

    def backward(g):
        if not x.requires_grad:
            return
        pad = [(0, 0)] * g.ndim
        pad[axis] = (ksize - 1, ksize - 1)
        gpad = np.pad(g, pad)
        gwin = np.lib.stride_tricks.sliding_window_view(gpad, ksize, axis=axis)
        x.accumulate_grad(gwin @ kernel[::-1])

    return Tensor.from_op(out, (x,), backward)


# ---------------------------------------------------------------------------
# positional encodings (constants, no gradient)
# ---------------------------------------------------------------------------

def sinusoid_table(positions, dim):
    """Sinusoidal features for arbitrary (possibly fractional) positions.

    Returns (dim, len(positions)): row 2i is sin(pos / 10000^(2i/dim)),
    row 2i+1 the matching cos.
    """
    if dim % 2 != 0:
        raise ValueError("positional encoding dimension must be even")
    positions = np.asarray(positions, dtype=np.float64)
    i = np.arange(dim // 2, dtype=np.float64)
    inv_freq = np.power(10000.0, -2.0 * i / dim)
    angles = inv_freq[:, None] * positions[None, :]
    table = np.empty((dim, positions.shape[0]), dtype=np.float32)
    table[0::2] = np.sin(angles)
    table[1::2] = np.cos(angles)
    return table


def positional_encoding(length, dim, offset=0):
    """Standard sinusoidal table of shape (dim, length) starting at `offset`."""
    return sinusoid_table(np.arange(length, dtype=np.float64) + offset, dim)
