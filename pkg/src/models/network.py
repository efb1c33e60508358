"""
HGNet configuration models.

This module contains the layer geometry, the network configuration and the
training hyper-parameters, plus the report returned by architecture validation.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, Field

from src.models.enums import ProjectionMode


class LayerSpec(BaseModel):
    """Convolution geometry of one layer."""

    kernel_w: int = Field(default=3, ge=1)
    kernel_h: int = Field(default=3, ge=1)
    stride_w: int = Field(default=1, ge=1)
    stride_h: int = Field(default=1, ge=1)
    pad_w: int = Field(default=1, ge=0)
    pad_h: int = Field(default=1, ge=0)
    channels: int = Field(..., ge=1, description="Output channels c_l")


class TrainConfig(BaseModel):
    """Unsupervised training hyper-parameters."""

    batch_size: int = Field(default=64, ge=2)
    learning_rate: float = Field(default=1e-3, gt=0)
    epochs: int = Field(default=30, ge=1)
    seed: int = Field(default=0, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)


class HGNetConfig(BaseModel):
    """Architecture and training configuration of HGNet."""

    layers: list[LayerSpec] = Field(..., min_length=2)
    antennas_per_ap: int = Field(default=2, ge=1, description="M")
    antennas_per_user: int = Field(default=2, ge=1, description="N")
    num_classes: int = Field(default=3, ge=1, description="T, source channel classes")
    discard_per_layer: int | None = Field(
        default=None, ge=0, description="C_dis; ceil(C/8) per layer when omitted"
    )
    grl_lambda: float = Field(default=1.0, ge=0)
    adv_weight: float = Field(default=0.1, ge=0)
    p_max: float = Field(default=1.0, gt=0)
    projection_mode: ProjectionMode = Field(default=ProjectionMode.EXACT)
    bn_eps: float = Field(default=1e-5, ge=0)
    declared_input: tuple[int, int] | None = Field(
        default=None, description="(Q, I) used to check strided layers"
    )
    train: TrainConfig = Field(default_factory=TrainConfig)

    @property
    def num_layers(self) -> int:
        """L."""
        return len(self.layers)

    @property
    def input_channels(self) -> int:
        """MN, channels of the modulus input tensor."""
        return self.antennas_per_ap * self.antennas_per_user

    def layer_input_channels(self, index: int) -> int:
        """Input channel count of layer ``index`` (0-based)."""
        return self.input_channels if index == 0 else self.layers[index - 1].channels

    def discard_count(self, channels: int) -> int:
        """Number of feature planes dropped by the mask for a layer of ``channels``."""
        if self.discard_per_layer is not None:
            return self.discard_per_layer
        return math.ceil(channels / 8)

    @property
    def generalization_enabled(self) -> bool:
        """Whether the discriminator/mask module takes part in training."""
        return self.adv_weight > 0 or self.discard_per_layer != 0

    def without_generalization(self) -> HGNetConfig:
        """Copy of this config with the generalization module switched off."""
        return self.model_copy(update={"adv_weight": 0.0, "discard_per_layer": 0})


class ArchitectureViolation(BaseModel):
    """One failed architecture condition."""

    layer: int | None = Field(..., description="1-based layer index, None for global rules")
    condition: str
    detail: str


class ArchitectureReport(BaseModel):
    """Result of architecture validation."""

    ok: bool
    violations: list[ArchitectureViolation] = Field(default_factory=list)


class ParameterCensus(BaseModel):
    """Learnable value counts by group kind."""

    total: int
    conv: int
    affine: int
    discriminator: int

    @property
    def affine_fraction(self) -> float:
        """Share of learnable values online adaptation may touch."""
        return self.affine / self.total if self.total else 0.0


CHECKPOINT_FORMAT_VERSION = 1


class CheckpointBlock(BaseModel):
    """Location of one parameter block inside ``params.bin``."""

    name: str
    shape: list[int]
    offset: int = Field(..., ge=0, description="Offset in float64 values")
    count: int = Field(..., ge=0)


class CheckpointManifest(BaseModel):
    """``manifest.json`` of a model checkpoint directory."""

    format_version: int = CHECKPOINT_FORMAT_VERSION
    dtype: str = "float64-le"
    config: HGNetConfig
    class_ids: list[int]
    bn_batches_seen: list[int]
    blocks: list[CheckpointBlock]
