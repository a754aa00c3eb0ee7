"""Differentiable numeric core: tensors, convolutions, layers, optimizers."""

from .tensor import AutodiffError, NonFiniteError, Tensor, as_tensor, no_grad
from .module import Module, parameter
from .layers import (
    BatchNormTemporal,
    Conv1d,
    Embedding,
    GatedResidualBlock,
    Linear,
    PlainResidualBlock,
)
from .optim import (
    Adam,
    NoamSchedule,
    PlateauSchedule,
    clip_grad_norm,
    global_grad_norm,
    noam_lr,
    schedule_lr,
)
from . import functional, kernels

__all__ = [
    "AutodiffError",
    "NonFiniteError",
    "Tensor",
    "as_tensor",
    "no_grad",
    "Module",
    "parameter",
    "BatchNormTemporal",
    "Conv1d",
    "Embedding",
    "GatedResidualBlock",
    "Linear",
    "PlainResidualBlock",
    "Adam",
    "NoamSchedule",
    "PlateauSchedule",
    "clip_grad_norm",
    "global_grad_norm",
    "noam_lr",
    "schedule_lr",
    "functional",
    "kernels",
]
