"""Settings of the classical beamforming baselines."""

from __future__ import annotations

from pydantic import BaseModel, Field


class WmmseConfig(BaseModel):
    """Stopping rules of the WMMSE solver."""

    max_iters: int = Field(default=200, ge=1)
    rate_tol: float = Field(default=1e-5, gt=0, description="Relative sum-rate change")
    bisection_tol: float = Field(default=1e-9, gt=0, description="Relative per-AP power tolerance")
    bisection_max_steps: int = Field(default=200, ge=1)
    max_sweeps: int = Field(default=50, ge=1, description="Multiplier sweeps over the APs")
