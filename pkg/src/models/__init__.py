"""
Data models for the beamforming lab.

This package contains the Pydantic models for scenarios, network and
adaptation configuration, diagnostics and experiment results.
"""

# Adaptation models
from .adaptation import (
    AdaptationReport,
    GroupDelta,
    IterationRecord,
    OAUConfig,
    ParamDeltaReport,
)

# Baseline models
from .baselines import WmmseConfig

# Diagnostics models
from .diagnostics import ArgumentCheck, GradCheckReport, LayerGap, MMDConfig

# Enums
from .enums import (
    CHANNEL_LABELS,
    ActivationKind,
    ChannelModel,
    DatasetSplit,
    ForwardMode,
    LargeScaleMode,
    Method,
    MMDEstimator,
    ProjectionMode,
    ReportFormat,
    ResetPolicy,
)

# Experiment models
from .experiment import RESULT_COLUMNS, ExperimentSpec, ResultRow, TimingStats

# Network models
from .network import (
    ArchitectureReport,
    ArchitectureViolation,
    CheckpointBlock,
    CheckpointManifest,
    HGNetConfig,
    LayerSpec,
    ParameterCensus,
    TrainConfig,
)

# Scenario models
from .scenario import (
    RICE_3DB,
    CSISample,
    DatasetManifest,
    PeriodManifest,
    PeriodSpec,
    ScenarioConfig,
)

__all__ = [
    # Enums
    "CHANNEL_LABELS",
    "ActivationKind",
    "ChannelModel",
    "DatasetSplit",
    "ForwardMode",
    "LargeScaleMode",
    "Method",
    "MMDEstimator",
    "ProjectionMode",
    "ReportFormat",
    "ResetPolicy",
    # Scenario
    "RICE_3DB",
    "CSISample",
    "DatasetManifest",
    "PeriodManifest",
    "PeriodSpec",
    "ScenarioConfig",
    # Network
    "ArchitectureReport",
    "ArchitectureViolation",
    "CheckpointBlock",
    "CheckpointManifest",
    "HGNetConfig",
    "LayerSpec",
    "ParameterCensus",
    "TrainConfig",
    # Adaptation
    "AdaptationReport",
    "GroupDelta",
    "IterationRecord",
    "OAUConfig",
    "ParamDeltaReport",
    # Baselines
    "WmmseConfig",
    # Diagnostics
    "ArgumentCheck",
    "GradCheckReport",
    "LayerGap",
    "MMDConfig",
    # Experiment
    "RESULT_COLUMNS",
    "ExperimentSpec",
    "ResultRow",
    "TimingStats",
]
