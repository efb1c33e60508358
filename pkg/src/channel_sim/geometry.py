"""
Node placement and large-scale fading.

APs and users are scattered uniformly over a square area; the large-scale
coefficient of each AP-user link follows a distance power law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.models.enums import LargeScaleMode
from src.models.scenario import ScenarioConfig

# Reference distance of the pathloss law in meters.
D_MIN = 1.0


def place_nodes(
    num_aps: int, num_users: int, area_side: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Scatter APs and users uniformly over ``[0, area_side]^2``.

    Returns:
        ``(ap_positions, user_positions)`` with shapes ``(Q, 2)`` and ``(I, 2)``.
    """
    if num_aps < 1 or num_users < 1:
        raise ValueError("need at least one AP and one user")
    aps = rng.uniform(0.0, area_side, size=(num_aps, 2))
    users = rng.uniform(0.0, area_side, size=(num_users, 2))
    return aps, users


def pathloss_beta(distance: float, alpha: float = 3.76, d_min: float = D_MIN) -> float:
    """Amplitude coefficient ``max(distance, d_min) ** (-alpha / 2)``."""
    return float(max(distance, d_min) ** (-alpha / 2.0))


def steering_vector(angle: float, count: int) -> np.ndarray:
    """Half-wavelength ULA response, element m is ``exp(j*pi*m*sin(angle))``.

    Returns:
        Complex column of shape ``(count, 1)``.
    """
    if count < 1:
        raise ValueError("array needs at least one element")
    m = np.arange(count)
    return np.exp(1j * np.pi * m * np.sin(angle)).reshape(count, 1)


@dataclass(slots=True)
class Geometry:
    """Node layout of one sample plus the array and fading settings."""

    ap_positions: np.ndarray
    user_positions: np.ndarray
    antennas_per_ap: int
    antennas_per_user: int
    pathloss_exponent: float = 3.76
    min_distance: float = D_MIN
    large_scale: LargeScaleMode = LargeScaleMode.PATHLOSS

    @classmethod
    def from_scenario(
        cls, scenario: ScenarioConfig, aps: np.ndarray, users: np.ndarray
    ) -> Geometry:
        return cls(
            ap_positions=aps,
            user_positions=users,
            antennas_per_ap=scenario.antennas_per_ap,
            antennas_per_user=scenario.antennas_per_user,
            pathloss_exponent=scenario.pathloss_exponent,
            min_distance=scenario.min_distance,
            large_scale=scenario.large_scale,
        )

    @property
    def num_aps(self) -> int:
        return int(self.ap_positions.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.user_positions.shape[0])

    def distance(self, q: int, i: int) -> float:
        return float(np.linalg.norm(self.ap_positions[q] - self.user_positions[i]))

    def beta(self, q: int, i: int) -> float:
        """Large-scale amplitude coefficient of link (AP q, user i)."""
        if self.large_scale == LargeScaleMode.UNIT:
            return 1.0
        return pathloss_beta(self.distance(q, i), self.pathloss_exponent, self.min_distance)
