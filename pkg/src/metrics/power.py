"""Per-AP power accounting and projection of complex ``(Q, I, M)`` beam tensors."""

from __future__ import annotations

import numpy as np

from src.core.errors import ShapeError
from src.models.enums import ProjectionMode


def _check_beams(v: np.ndarray) -> None:
    if v.ndim != 3:
        raise ShapeError(f"beam tensor must be (Q, I, M), got {v.shape}")


def ap_powers(v: np.ndarray) -> np.ndarray:
    """Transmit power of every AP, shape ``(Q,)``."""
    _check_beams(v)
    return np.sum(np.abs(v) ** 2, axis=(1, 2))


def per_ap_power(v: np.ndarray, q: int) -> float:
    """``sum_i ||v_i^q||^2`` for AP ``q``."""
    return float(ap_powers(v)[q])


def projection_scale(
    powers: np.ndarray, p_max: float, mode: ProjectionMode = ProjectionMode.EXACT
) -> np.ndarray:
    """Multiplier applied to each AP's beams; 1 where the AP is within budget."""
    if p_max <= 0:
        raise ValueError("power budget must be positive")
    over = powers > p_max
    safe = np.where(over, powers, 1.0)
    if mode == ProjectionMode.EXACT:
        return np.where(over, np.sqrt(p_max / safe), 1.0)
    return np.where(over, p_max / safe, 1.0)


def project_power(
    v: np.ndarray, p_max: float, mode: ProjectionMode = ProjectionMode.EXACT
) -> np.ndarray:
    """Scale every over-budget AP back inside the power ball."""
    scale = projection_scale(ap_powers(v), p_max, mode)
    return v * scale[:, None, None]


def is_feasible(v: np.ndarray, p_max: float, rtol: float = 1e-9) -> bool:
    """True when every AP respects ``p_max * (1 + rtol)``."""
    return bool(np.all(ap_powers(v) <= p_max * (1.0 + rtol)))
