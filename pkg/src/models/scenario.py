"""
Scenario and CSI sample models.

This module describes a dynamic-environment experiment (periods with their own
AP/user counts and channel family) and the per-period channel samples the
generator produces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.enums import CHANNEL_LABELS, ChannelModel, DatasetSplit, LargeScaleMode

# 3 dB Rice factor as a linear power ratio.
RICE_3DB: float = 10.0**0.3

DATASET_FORMAT_VERSION = 1


class PeriodSpec(BaseModel):
    """One period of constant channel distribution and (Q_t, I_t)."""

    num_aps: int = Field(..., ge=1, description="Q_t, number of APs in the period")
    num_users: int = Field(..., ge=1, description="I_t, number of users in the period")
    channel_model: ChannelModel = Field(..., description="Channel family")
    rice_factor: float | None = Field(
        default=None,
        ge=0.0,
        description="Linear LoS/NLoS power ratio; derived from the family when omitted",
    )
    paths: int = Field(default=6, ge=1, description="Propagation paths (multipath only)")
    sample_count: int = Field(default=128, ge=1, description="Samples generated for the period")
    split: DatasetSplit = Field(default=DatasetSplit.TRAIN, description="Dataset partition")

    @model_validator(mode="after")
    def _default_rice_factor(self) -> PeriodSpec:
        if self.rice_factor is None:
            if self.channel_model == ChannelModel.RICIAN:
                self.rice_factor = RICE_3DB
            else:
                self.rice_factor = 0.0
        return self

    @property
    def label(self) -> int:
        """Canonical integer label of the channel family."""
        return CHANNEL_LABELS[self.channel_model]

    @property
    def effective_rice_factor(self) -> float:
        """Rice factor with the family default applied."""
        return float(self.rice_factor or 0.0)


class ScenarioConfig(BaseModel):
    """Full description of a dynamic-environment experiment."""

    periods: list[PeriodSpec] = Field(..., min_length=1)
    area_side: float = Field(default=500.0, gt=0, description="Square area side in meters")
    antennas_per_ap: int = Field(default=2, ge=1, description="M")
    antennas_per_user: int = Field(default=2, ge=1, description="N")
    p_max: float = Field(default=1.0, gt=0, description="Per-AP power budget in watts")
    noise_power: float = Field(default=1.0, gt=0, description="σ² in watts")
    pathloss_exponent: float = Field(default=3.76, gt=0, description="α")
    min_distance: float = Field(default=1.0, gt=0, description="Pathloss clamp distance d_min")
    large_scale: LargeScaleMode = Field(default=LargeScaleMode.PATHLOSS)
    seed: int = Field(default=0, ge=0, lt=2**64)

    def periods_for(self, split: DatasetSplit) -> list[tuple[int, PeriodSpec]]:
        """Return ``(period_index, period)`` pairs belonging to ``split``."""
        return [(k, p) for k, p in enumerate(self.periods) if p.split == split]


@dataclass(slots=True)
class CSISample:
    """One period's complex channel for Q_t APs and I_t users.

    ``H`` has shape ``(I_t*N, Q_t*M)``; block ``(i, q)`` of shape ``N×M`` is the
    channel from AP ``q`` to user ``i``.
    """

    H: np.ndarray
    period_index: int
    channel_model_label: int
    noise_power: float
    num_aps: int
    num_users: int

    def user_block(self, i: int, n_antennas: int) -> np.ndarray:
        """Rows of ``H`` received by user ``i``."""
        return self.H[i * n_antennas : (i + 1) * n_antennas, :]


class PeriodManifest(BaseModel):
    """Manifest entry for one period file."""

    period_index: int
    file: str
    num_aps: int
    num_users: int
    rows: int
    cols: int
    sample_count: int
    channel_model: ChannelModel
    label: int
    rice_factor: float
    paths: int
    split: DatasetSplit
    seed: int


class DatasetManifest(BaseModel):
    """``manifest.json`` of a dataset directory."""

    format_version: int = DATASET_FORMAT_VERSION
    dtype: str = "complex128-le"
    layout: str = "row-major (I_t*N) x (Q_t*M), samples concatenated"
    antennas_per_ap: int
    antennas_per_user: int
    noise_power: float
    p_max: float
    seed: int
    periods: list[PeriodManifest]
