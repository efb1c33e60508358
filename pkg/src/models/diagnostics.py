"""
Configuration and report models for numeric diagnostics.

Covers the kernel two-sample settings and the gradient-check report.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from src.models.enums import MMDEstimator


class MMDConfig(BaseModel):
    """RBF kernel two-sample settings.

    ``bandwidth`` is the kernel length-scale h in exp(-||x-y||² / (2h²)). When
    it is None the median pooled pairwise distance is used.
    """

    bandwidth: float | None = Field(default=None, gt=0)
    estimator: MMDEstimator = Field(default=MMDEstimator.BIASED)

    @property
    def median_heuristic(self) -> bool:
        """True when the bandwidth is chosen from the data."""
        return self.bandwidth is None


class ArgumentCheck(BaseModel):
    """Gradient agreement for one argument of an op."""

    argument: str
    max_rel_error: float
    max_abs_error: float


class GradCheckReport(BaseModel):
    """Outcome of comparing reverse-mode and finite-difference gradients."""

    op: str
    tolerance: float
    arguments: list[ArgumentCheck] = Field(default_factory=list)
    passed: bool = False

    @model_validator(mode="after")
    def _derive_passed(self) -> GradCheckReport:
        self.passed = all(a.max_rel_error < self.tolerance for a in self.arguments)
        return self


class LayerGap(BaseModel):
    """Feature-distribution gaps measured at one hidden layer."""

    layer: int = Field(..., ge=1)
    source_gap: float = Field(..., ge=0)
    target_gap: float | None = Field(default=None, ge=0)
