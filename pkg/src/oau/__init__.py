"""Online adaptation of the batch-norm affine values."""

from src.oau.adapter import (
    AdaptResult,
    adapt,
    adapt_batch,
    adaptation_step,
    param_delta_report,
)
from src.oau.entropy import entropy_loss, entropy_objective, stack_real

__all__ = [
    "AdaptResult",
    "adapt",
    "adapt_batch",
    "adaptation_step",
    "entropy_loss",
    "entropy_objective",
    "param_delta_report",
    "stack_real",
]
