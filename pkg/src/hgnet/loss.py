"""
Negative sum rate as a training loss, with its analytic gradient.

With ``A_i`` the covariance of user i's received signal and ``B_i`` the same
without its own signal, the derivative of the sum rate with respect to the
conjugate of beam ``v_j`` is

    (1 / ln 2) [ sum_i H_i^H (A_i^-1 - B_i^-1) H_i v_j + H_j^H B_j^-1 H_j v_j ].

The real and imaginary partials are twice its real and imaginary parts.
"""

from __future__ import annotations

import math

import numpy as np

from src.core.errors import NumericError, ShapeError
from src.metrics.rates import covariances, user_rates, vectors_to_beams


def rate_loss_grad(
    h: np.ndarray, v: np.ndarray, noise_power: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss ``-sum_rate`` and its partials with respect to ``Re V`` and ``Im V``.

    Args:
        h: Channel ``(I*N, Q*M)``.
        v: Complex beams ``(Q, I, M)``.
        noise_power: Receiver noise power.

    Returns:
        ``(loss, d_re, d_im)`` with both partials shaped like ``v``.
    """
    hs, s, a, b = covariances(h, v, noise_power)
    num_aps, num_users, m = v.shape
    a_inv = np.linalg.inv(a)
    b_inv = np.linalg.inv(b)
    own = s[np.arange(num_users), :, np.arange(num_users)]

    cross = np.einsum("inx,inm,imj->jx", hs.conj(), a_inv - b_inv, s)
    self_term = np.einsum("jnx,jnm,jm->jx", hs.conj(), b_inv, own)
    d_conj = (cross + self_term) / math.log(2.0)
    if not np.all(np.isfinite(d_conj)):
        raise NumericError("non-finite rate gradient")

    grad = vectors_to_beams(d_conj, num_aps, m)
    loss = -float(user_rates(h, v, noise_power).sum())
    return loss, -2.0 * grad.real, -2.0 * grad.imag


def batch_rate_loss(
    channels: list[np.ndarray], beams: np.ndarray, noise_power: float
) -> tuple[float, np.ndarray]:
    """Mean ``-sum_rate`` over a batch and its gradient w.r.t. real-stacked beams.

    Args:
        channels: One channel matrix per sample.
        beams: Complex beams ``(B, Q, I, M)``.
        noise_power: Receiver noise power.

    Returns:
        The mean loss and a ``(B, Q, I, 2M)`` gradient, real parts first.
    """
    if len(channels) != beams.shape[0]:
        raise ShapeError(f"{len(channels)} channels for a batch of {beams.shape[0]} beams")
    count = len(channels)
    grads = np.empty((*beams.shape[:-1], 2 * beams.shape[-1]))
    total = 0.0
    m = beams.shape[-1]
    for index, (h, v) in enumerate(zip(channels, beams, strict=True)):
        loss, d_re, d_im = rate_loss_grad(h, v, noise_power)
        total += loss
        grads[index, ..., :m] = d_re / count
        grads[index, ..., m:] = d_im / count
    return total / count, grads
