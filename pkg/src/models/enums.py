"""
Enumerations for the beamforming lab.

This module contains all enum definitions used throughout the system.
"""

from enum import StrEnum


class ChannelModel(StrEnum):
    """Synthetic channel family of a period."""

    MULTIPATH = "multipath"  # Geometric multi-path model
    RAYLEIGH = "rayleigh"  # Rice model with zero LoS power
    RICIAN = "rician"  # Rice model, 3 dB by default


class DatasetSplit(StrEnum):
    """Dataset partition a period belongs to."""

    TRAIN = "train"
    TEST = "test"


class LargeScaleMode(StrEnum):
    """How the large-scale fading coefficient is derived from geometry."""

    PATHLOSS = "pathloss"  # Distance power law
    UNIT = "unit"  # Coefficient fixed to 1


class ForwardMode(StrEnum):
    """Network / batch-norm execution mode."""

    TRAIN = "train"
    INFER = "infer"


class ActivationKind(StrEnum):
    """Elementwise activation."""

    RELU = "relu"
    TANH = "tanh"


class ProjectionMode(StrEnum):
    """Per-AP power projection rule."""

    EXACT = "exact"  # Square-root scaling onto the power ball
    LINEAR = "linear"  # Linear scaling by P_max / power


class MMDEstimator(StrEnum):
    """Kernel two-sample estimator."""

    BIASED = "biased"
    UNBIASED = "unbiased"


class ResetPolicy(StrEnum):
    """What happens to the BN affine values between adapted samples."""

    PER_SAMPLE = "per_sample"
    PERSISTENT = "persistent"


class Method(StrEnum):
    """Beamforming method evaluated by the harness."""

    WMMSE = "wmmse"
    MRT = "mrt"
    HGNET = "hgnet"
    HGNET_NO_G = "hgnet_no_g"  # HGNet trained without the generalization module


class ReportFormat(StrEnum):
    """Result table serialization."""

    CSV = "csv"
    JSON = "json"


# Canonical integer labels stored with every CSI sample.
CHANNEL_LABELS: dict[ChannelModel, int] = {
    ChannelModel.MULTIPATH: 0,
    ChannelModel.RAYLEIGH: 1,
    ChannelModel.RICIAN: 2,
}
