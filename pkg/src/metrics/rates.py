"""
Achievable-rate evaluation.

``H`` is the ``(I*N, Q*M)`` channel of a period and ``V`` the complex
``(Q, I, M)`` beam tensor. User i's stacked beam ``v_i`` has entry ``q*M + m``
equal to ``V[q, i, m]``.
"""

from __future__ import annotations

import math

import numpy as np

from src.core.errors import NumericError, ShapeError


def beams_to_vectors(v: np.ndarray) -> np.ndarray:
    """Stack beams per user: ``(Q, I, M) -> (I, Q*M)``."""
    q, i, m = v.shape
    return v.transpose(1, 0, 2).reshape(i, q * m)


def vectors_to_beams(vectors: np.ndarray, num_aps: int, antennas_per_ap: int) -> np.ndarray:
    """Inverse of ``beams_to_vectors``."""
    num_users = vectors.shape[0]
    return vectors.reshape(num_users, num_aps, antennas_per_ap).transpose(1, 0, 2)


def user_blocks(h: np.ndarray, num_users: int) -> np.ndarray:
    """Split ``(I*N, Q*M)`` into per-user rows ``(I, N, Q*M)``."""
    rows, cols = h.shape
    if rows % num_users:
        raise ShapeError(f"{rows} channel rows cannot be split over {num_users} users")
    return h.reshape(num_users, rows // num_users, cols)


def covariances(
    h: np.ndarray, v: np.ndarray, noise_power: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-user received covariances.

    Returns:
        ``(Hs, S, A, B)`` where ``Hs`` is ``(I, N, QM)``, ``S[i, :, j] = H_i v_j``,
        ``A_i`` is signal-plus-interference-plus-noise and ``B_i`` excludes the
        user's own signal.
    """
    if v.ndim != 3:
        raise ShapeError(f"beam tensor must be (Q, I, M), got {v.shape}")
    num_aps, num_users, m = v.shape
    if h.shape[1] != num_aps * m:
        raise ShapeError(f"channel has {h.shape[1]} columns, beams imply {num_aps * m}")
    if noise_power <= 0:
        raise ValueError("noise power must be positive")
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(v))):
        raise NumericError("non-finite channel or beam entries")
    hs = user_blocks(h, num_users)
    n = hs.shape[1]
    vec = beams_to_vectors(v)
    s = np.einsum("inx,jx->inj", hs, vec)
    a = noise_power * np.eye(n) + np.einsum("inj,imj->inm", s, s.conj())
    own = s[np.arange(num_users), :, np.arange(num_users)]
    b = a - np.einsum("in,im->inm", own, own.conj())
    return hs, s, a, b


def user_rates(h: np.ndarray, v: np.ndarray, noise_power: float) -> np.ndarray:
    """Rate of every user in bits/s/Hz, shape ``(I,)``."""
    _, _, a, b = covariances(h, v, noise_power)
    _, logdet_a = np.linalg.slogdet(a)
    _, logdet_b = np.linalg.slogdet(b)
    rates = (logdet_a - logdet_b) / math.log(2.0)
    if not np.all(np.isfinite(rates)):
        raise NumericError("non-finite user rate")
    return np.maximum(rates, 0.0)


def user_rate(h_i: np.ndarray, v: np.ndarray, i: int, noise_power: float) -> float:
    """Rate of user ``i`` given its ``(N, Q*M)`` channel rows.

    ``log2 det(I + H_i v_i v_i^H H_i^H (sum_{j != i} H_i v_j v_j^H H_i^H + s2 I)^-1)``,
    evaluated as ``log2 det A_i - log2 det B_i``.
    """
    if h_i.ndim != 2:
        raise ShapeError(f"user channel must be (N, Q*M), got {h_i.shape}")
    num_users = v.shape[1]
    if not 0 <= i < num_users:
        raise ShapeError(f"user index {i} outside [0, {num_users})")
    return float(user_rates(np.tile(h_i, (num_users, 1)), v, noise_power)[i])


def sum_rate(h: np.ndarray, v: np.ndarray, noise_power: float) -> float:
    """Sum of user rates in bits/s/Hz."""
    return float(user_rates(h, v, noise_power).sum())
