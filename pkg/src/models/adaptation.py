"""
Online adaptation models.

Configuration of the BN-affine adaptation loop and the per-sample reports it
emits.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from src.models.enums import ResetPolicy


class OAUConfig(BaseModel):
    """Online adaptive updating configuration."""

    iterations: int = Field(default=10, ge=0, description="H, update iterations per sample")
    learning_rate: float = Field(default=1e-3, gt=0, description="R")
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    reset_policy: ResetPolicy = Field(default=ResetPolicy.PER_SAMPLE)


class IterationRecord(BaseModel):
    """Metrics of one adaptation iteration."""

    h: int = Field(..., ge=0)
    entropy: float
    sum_rate_bits: float
    wall_ms: float = Field(..., ge=0)


class AdaptationReport(BaseModel):
    """Per-sample record of the adaptation loop."""

    sample_index: int = 0
    iterations: list[IterationRecord] = Field(default_factory=list)
    touched_fraction: float = Field(..., ge=0, le=1)
    final_sum_rate_bits: float
    aborted: bool = False
    error: str | None = None


class GroupDelta(BaseModel):
    """Max-abs change of one parameter group."""

    group: str
    max_abs_delta: float
    affine: bool


class ParamDeltaReport(BaseModel):
    """Comparison of two parameter sets of the same architecture."""

    groups: list[GroupDelta]
    touched_fraction: float
    affine_values: int
    total_values: int
