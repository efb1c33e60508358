"""
Experiment, result-row and timing models.

An ``ExperimentSpec`` is the single JSON document that drives a whole run; a
``ResultRow`` is one cell of the emitted table.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.adaptation import OAUConfig
from src.models.baselines import WmmseConfig
from src.models.diagnostics import MMDConfig
from src.models.enums import ChannelModel, Method
from src.models.network import HGNetConfig
from src.models.scenario import ScenarioConfig

EXPERIMENT_SCHEMA_VERSION = 1


class ExperimentSpec(BaseModel):
    """Complete description of an experiment run."""

    schema_version: Literal[1] = EXPERIMENT_SCHEMA_VERSION
    name: str = Field(default="experiment")
    scenario: ScenarioConfig
    net: HGNetConfig
    oau: OAUConfig = Field(default_factory=OAUConfig)
    wmmse: WmmseConfig = Field(default_factory=WmmseConfig)
    mmd: MMDConfig = Field(default_factory=MMDConfig)
    methods: list[Method] = Field(
        default_factory=lambda: [Method.WMMSE, Method.MRT, Method.HGNET],
        min_length=1,
    )
    eval_sizes: list[tuple[int, int]] = Field(..., min_length=1, description="(Q, I) pairs")
    eval_channels: list[ChannelModel] | None = Field(
        default=None,
        description="Channel families to evaluate; test periods' families when omitted",
    )
    eval_samples: int = Field(default=32, ge=1, description="Samples per evaluation cell")
    h_sweep: list[int] = Field(default_factory=list, description="OAU iteration counts to sweep")
    dataset_dir: str | None = None
    checkpoint: str | None = None
    output: str = Field(default="results")

    @field_validator("eval_sizes")
    @classmethod
    def _positive_sizes(cls, sizes: list[tuple[int, int]]) -> list[tuple[int, int]]:
        for q, i in sizes:
            if q < 1 or i < 1:
                raise ValueError(f"eval size ({q}, {i}) must be at least (1, 1)")
        return sizes

    @field_validator("h_sweep")
    @classmethod
    def _non_negative_sweep(cls, sweep: list[int]) -> list[int]:
        if any(h < 0 for h in sweep):
            raise ValueError("h_sweep values must be non-negative")
        return sweep

    @model_validator(mode="after")
    def _antennas_agree(self) -> ExperimentSpec:
        if (self.net.antennas_per_ap, self.net.antennas_per_user) != (
            self.scenario.antennas_per_ap,
            self.scenario.antennas_per_user,
        ):
            raise ValueError("network and scenario antenna counts (M, N) differ")
        if self.net.p_max != self.scenario.p_max:
            raise ValueError("network and scenario power budgets differ")
        return self

    @property
    def needs_network(self) -> bool:
        """True when any requested method requires a trained HGNet."""
        return any(m in (Method.HGNET, Method.HGNET_NO_G) for m in self.methods) or bool(
            self.h_sweep
        )


# Fixed CSV column order.
RESULT_COLUMNS: tuple[str, ...] = (
    "method",
    "channel_model",
    "num_aps",
    "num_users",
    "oau_iterations",
    "mean_sum_rate",
    "std_sum_rate",
    "mean_wall_s",
    "sample_count",
    "seed",
)


class ResultRow(BaseModel):
    """One evaluated (method, channel, size) cell."""

    method: Method
    channel_model: ChannelModel
    num_aps: int = Field(..., ge=1)
    num_users: int = Field(..., ge=1)
    oau_iterations: int | None = Field(default=None, ge=0)
    mean_sum_rate: float = Field(..., description="bits/s/Hz")
    std_sum_rate: float = Field(..., ge=0)
    mean_wall_s: float = Field(..., ge=0)
    sample_count: int = Field(..., gt=0)
    seed: int


class TimingStats(BaseModel):
    """Per-sample latency statistics of one method."""

    method: str
    instances: int = Field(..., gt=0)
    repetitions: int = Field(..., ge=5)
    median_s: float = Field(..., ge=0)
    mean_s: float = Field(..., ge=0)
    std_s: float = Field(..., ge=0)
    min_s: float = Field(..., ge=0)
    hardware: str
