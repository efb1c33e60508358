"""Experiment orchestration, benchmarks and report emission."""

from src.harness.bench import bench_timing, hardware_descriptor, time_beamformer
from src.harness.config import LabSettings, load_experiment, preset, with_overrides
from src.harness.experiment import (
    ExperimentResult,
    TrainedNet,
    make_beamformer,
    mmd_diagnostics,
    oau_reports,
    prepare_networks,
    run_experiment,
    training_samples,
)
from src.harness.report import (
    CsvReportSink,
    JsonlAdaptationSink,
    JsonReportSink,
    emit_adaptation,
    emit_report,
    emit_timings,
    read_json_report,
)

__all__ = [
    "CsvReportSink",
    "ExperimentResult",
    "JsonReportSink",
    "JsonlAdaptationSink",
    "LabSettings",
    "TrainedNet",
    "bench_timing",
    "emit_adaptation",
    "emit_report",
    "emit_timings",
    "hardware_descriptor",
    "load_experiment",
    "make_beamformer",
    "mmd_diagnostics",
    "oau_reports",
    "prepare_networks",
    "preset",
    "read_json_report",
    "run_experiment",
    "time_beamformer",
    "training_samples",
    "with_overrides",
]
