"""Maximum-ratio transmission reference beamformer."""

from __future__ import annotations

import numpy as np

from src.metrics.power import project_power
from src.metrics.rates import user_blocks, vectors_to_beams
from src.models.enums import ProjectionMode


def dominant_direction(h_i: np.ndarray) -> np.ndarray:
    """Unit dominant right singular vector of ``h_i``; zero for a zero channel."""
    if not np.any(h_i):
        return np.zeros(h_i.shape[1], dtype=np.complex128)
    _, _, vh = np.linalg.svd(h_i)
    return vh[0].conj()


def mrt_baseline(h: np.ndarray, p_max: float, *, num_aps: int, num_users: int) -> np.ndarray:
    """MRT beams ``(Q, I, M)``.

    Every user's beam follows its dominant channel direction with an equal share
    ``Q * p_max / I`` of the total budget; over-budget APs are then scaled down.
    """
    antennas_per_ap = h.shape[1] // num_aps
    hs = user_blocks(h, num_users)
    share = np.sqrt(num_aps * p_max / num_users)
    vectors = np.stack([share * dominant_direction(hs[i]) for i in range(num_users)])
    beams = vectors_to_beams(vectors, num_aps, antennas_per_ap)
    return project_power(beams, p_max, ProjectionMode.EXACT)
