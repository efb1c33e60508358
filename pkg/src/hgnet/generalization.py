"""
High-generalization module attached after layers 1..L-1.

A linear discriminator tries to recognise the channel class from pooled
features while a gradient reversal pushes the extractor the other way. The
discriminator's own weights then score every feature plane, and weighted
random sampling discards the planes most tied to the channel class.
"""

from __future__ import annotations

import numpy as np

from src.core.errors import ShapeError
from src.diffnum import GradTape, TensorR, channel_mask, fc, grl, softmax_cross_entropy

# Floor added after rectifying scores so every plane keeps a positive probability.
SCORE_FLOOR = 1e-8


def discriminator_loss(
    g: TensorR,
    weights: TensorR,
    bias: TensorR,
    labels: np.ndarray,
    grl_lambda: float = 1.0,
    tape: GradTape | None = None,
) -> tuple[TensorR, np.ndarray]:
    """Mean cross-entropy of the discriminator on pooled ``(B, C)`` features.

    The features pass through a gradient reversal first, so on backward the
    extractor receives ``-grl_lambda`` times the discriminator's gradient.

    Returns:
        The scalar loss tensor and the ``(B, T)`` logits.
    """
    logits = fc(grl(g, grl_lambda, tape), weights, bias, tape)
    return softmax_cross_entropy(logits, labels, tape), logits.data


def feature_scores(g: np.ndarray, weights: np.ndarray, labels: np.ndarray | int) -> np.ndarray:
    """Per-plane contribution of pooled features to the true-class logit.

    Args:
        g: Pooled features ``(C,)`` or ``(B, C)``.
        weights: Discriminator weights ``(T, C)``.
        labels: True class index, one per sample.
    """
    if g.shape[-1] != weights.shape[-1]:
        raise ShapeError(f"features {g.shape} do not match weights {weights.shape}")
    return weights[np.asarray(labels)] * g


def drop_probs(scores: np.ndarray) -> np.ndarray:
    """Rectified, floored and normalized scores along the last axis."""
    s = np.maximum(scores, 0.0) + SCORE_FLOOR
    return s / s.sum(axis=-1, keepdims=True)


def wrs_keys(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Weighted-random-sampling keys, ranked like ``r ** (1 / p)`` with ``r`` uniform.

    The keys are ``log(r) / p``. That order-equivalent form stays finite for
    floored probabilities, where ``r ** (1 / p)`` underflows to a tie at zero.
    """
    r = rng.random(probs.shape)
    with np.errstate(divide="ignore"):
        return np.log(r) / probs


def mask_from_keys(keys: np.ndarray, discard: int) -> np.ndarray:
    """Binary mask zeroing the ``discard`` largest keys along the last axis."""
    channels = keys.shape[-1]
    if not 0 <= discard < channels:
        raise ValueError(f"discard count {discard} must lie in [0, {channels})")
    mask = np.ones(keys.shape)
    if discard == 0:
        return mask
    top = np.argsort(-keys, axis=-1, kind="stable")[..., :discard]
    np.put_along_axis(mask, top, 0.0, axis=-1)
    return mask


def wrs_mask(probs: np.ndarray, discard: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a per-sample discard mask with exactly ``C - discard`` ones."""
    if discard == 0:
        return np.ones(probs.shape)
    return mask_from_keys(wrs_keys(probs, rng), discard)


def apply_mask(c: TensorR, mask: np.ndarray, tape: GradTape | None = None) -> TensorR:
    """Scale the channel planes of ``(B, W, H, C)`` activations by a ``(B, C)`` mask."""
    if mask.shape[-1] != c.shape[-1]:
        raise ShapeError(f"mask length {mask.shape[-1]} does not match {c.shape[-1]} channels")
    return channel_mask(c, mask, tape)
