"""Layers the two synthesis networks are assembled from."""

from __future__ import annotations

import numpy as np

from . import functional as F
from .module import Module, parameter


def _rng(rng):
    return rng if rng is not None else np.random.default_rng()


class Conv1d(Module):
    """Length-preserving dilated 1D convolution, causal or centered."""

    def __init__(self, in_channels, out_channels, kernel_size, dilation=1,
                 causal=False, rng=None):
        super().__init__()
        rng = _rng(rng)
        bound = 1.0 / np.sqrt(in_channels * kernel_size)
        self.weight = parameter(rng.uniform(-bound, bound,
                                            (out_channels, in_channels, kernel_size)))
        self.bias = parameter(np.zeros(out_channels))
        self.dilation = int(dilation)
        self.causal = bool(causal)

    def forward(self, x):
        return F.conv1d(x, self.weight, self.bias,
                        dilation=self.dilation, causal=self.causal)


class Linear(Module):
    """Per-time-step affine map on (batch, channels, time)."""

    def __init__(self, in_features, out_features, rng=None):
        super().__init__()
        rng = _rng(rng)
        bound = 1.0 / np.sqrt(in_features)
        self.weight = parameter(rng.uniform(-bound, bound, (out_features, in_features)))
        self.bias = parameter(np.zeros(out_features))

    def forward(self, x):
        return F.linear(x, self.weight, self.bias)


class Embedding(Module):
    """Integer ids (batch, n) -> dense (batch, dim, n)."""

    def __init__(self, vocab_size, dim, rng=None):
        super().__init__()
        rng = _rng(rng)
        self.weight = parameter(rng.normal(0.0, 1.0 / np.sqrt(dim), (vocab_size, dim)))

    def forward(self, ids):
        return F.embedding(self.weight, ids)


class BatchNormTemporal(Module):
    """Per-channel normalization over every batch item and time step.

    Train mode normalizes with batch statistics and updates running stats by
    exponential moving average; eval mode is a fixed per-channel affine map.
    """

    def __init__(self, channels, eps=1e-5, momentum=0.1):
        super().__init__()
        self.scale = parameter(np.ones(channels))
        self.shift = parameter(np.zeros(channels))
        self.eps = float(eps)
        self.momentum = float(momentum)
        self.register_buffer("running_mean", np.zeros(channels))
        self.register_buffer("running_var", np.ones(channels))

    def forward(self, x):
        if self.training:
            n = x.shape[0] * x.shape[2]
            if n < 2:
                raise ValueError("batch norm needs batch*time >= 2 in train mode")
            m = F.mean(x, axis=(0, 2), keepdims=True)
            centered = F.sub(x, m)
            var = F.mean(F.mul(centered, centered), axis=(0, 2), keepdims=True)
            inv = F.div(1.0, F.sqrt(F.add(var, self.eps)))
            norm = F.mul(centered, inv)
            # running stats use the unbiased variance, update outside the tape
            mu = m.data.reshape(-1).astype(np.float32)
            v = var.data.reshape(-1).astype(np.float32) * (n / (n - 1))
            self._buffers["running_mean"] = ((1 - self.momentum) * self._buffers["running_mean"]
                                             + self.momentum * mu)
            self._buffers["running_var"] = ((1 - self.momentum) * self._buffers["running_var"]
                                            + self.momentum * v)
        else:
            mu = self._buffers["running_mean"][None, :, None]
            sd = np.sqrt(self._buffers["running_var"][None, :, None] + self.eps)
            norm = F.mul(F.sub(x, mu), 1.0 / sd)
        return F.add(F.mul(norm, _per_channel(self.scale)),
                     _per_channel(self.shift))


def _per_channel(t):
    """View a (channels,) parameter as (1, channels, 1) for broadcasting."""
    from .tensor import Tensor

    out = t.data[None, :, None]

    def backward(g):
        if t.requires_grad:
            t.accumulate_grad(g.sum(axis=(0, 2)))

    return Tensor.from_op(out, (t,), backward)


class GatedResidualBlock(Module):
    """Dilated conv -> tanh/sigmoid gate -> 1x1 projection; residual + skip outs."""

    def __init__(self, residual_channels, gate_channels, kernel_size, dilation,
                 causal, rng=None):
        super().__init__()
        if gate_channels % 2 != 0:
            raise ValueError("gate_channels must be even (filter/gate halves)")
        self.half = gate_channels // 2
        self.conv = Conv1d(residual_channels, gate_channels, kernel_size,
                           dilation=dilation, causal=causal, rng=rng)
        self.proj = Conv1d(self.half, residual_channels, 1, rng=rng)

    def forward(self, x):
        z = self.conv(x)
        filt = F.narrow(z, 1, 0, self.half)
        gate = F.narrow(z, 1, self.half, self.half)
        gated = F.mul(F.tanh(filt), F.sigmoid(gate))
        skip = self.proj(gated)
        return F.add(x, skip), skip


class PlainResidualBlock(Module):
    """Conv -> ReLU -> temporal batch norm -> residual add."""

    def __init__(self, channels, kernel_size, dilation, causal=False, rng=None):
        super().__init__()
        self.conv = Conv1d(channels, channels, kernel_size,
                           dilation=dilation, causal=causal, rng=rng)
        self.norm = BatchNormTemporal(channels)

    def forward(self, x):
        return F.add(x, self.norm(F.relu(self.conv(x))))
