"""Classical beamforming baselines."""

from src.baselines.mrt import dominant_direction, mrt_baseline
from src.baselines.wmmse import WmmseResult, wmmse_solve

__all__ = ["WmmseResult", "dominant_direction", "mrt_baseline", "wmmse_solve"]
