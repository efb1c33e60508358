"""Minimal differentiable numerical core."""

from src.diffnum.gradcheck import grad_check
from src.diffnum.ops import (
    BatchNormState,
    activation,
    add,
    batchnorm,
    channel_mask,
    conv2d,
    conv_output_size,
    fc,
    gap,
    grl,
    magnitude_entropy,
    project_power,
    softmax_cross_entropy,
)
from src.diffnum.optim import Adam
from src.diffnum.tape import GradTape, OpRecord, ParamGroup
from src.diffnum.tensor import TensorC, TensorR

__all__ = [
    "Adam",
    "BatchNormState",
    "GradTape",
    "OpRecord",
    "ParamGroup",
    "TensorC",
    "TensorR",
    "activation",
    "add",
    "batchnorm",
    "channel_mask",
    "conv2d",
    "conv_output_size",
    "fc",
    "gap",
    "grad_check",
    "grl",
    "magnitude_entropy",
    "project_power",
    "softmax_cross_entropy",
]
