"""
Information-entropy objective for online adaptation.

The loss sums ``|a log a|`` over the magnitudes of every complex beam entry.
It needs only elementwise products and sums, no matrix inversion.
"""

from __future__ import annotations

import numpy as np

from src.diffnum import GradTape, TensorR, magnitude_entropy


def stack_real(v: np.ndarray) -> np.ndarray:
    """Complex ``(..., M)`` beams to real-stacked ``(..., 2M)``, real parts first."""
    return np.concatenate([v.real, v.imag], axis=-1)


def entropy_loss(v: np.ndarray) -> float:
    """Entropy objective of complex beams of any leading shape."""
    return magnitude_entropy(TensorR(stack_real(v)), v.shape[-1]).item()


def entropy_objective(
    output: TensorR, antennas_per_ap: int, tape: GradTape | None = None
) -> TensorR:
    """Differentiable entropy of a real-stacked network output."""
    return magnitude_entropy(output, antennas_per_ap, tape)
