"""
Per-sample latency benchmarks.

A warm-up pass over the first instance is excluded. Each repetition times
every instance and contributes its mean per-sample latency; statistics are
taken over repetitions. Timing covers the input transform, the forward pass
and the projection, never data loading.
"""

from __future__ import annotations

import platform
from collections.abc import Sequence

import numpy as np
import structlog

from src.core.time import Clock, PerfCounterClock
from src.harness.experiment import Beamformer, TrainedNet, make_beamformer
from src.models.enums import Method
from src.models.experiment import ExperimentSpec, TimingStats
from src.models.scenario import CSISample

logger = structlog.get_logger(__name__)

MIN_REPETITIONS = 5


def hardware_descriptor() -> str:
    """Short description of the machine the timings come from."""
    cpu = platform.processor() or platform.machine()
    return f"{cpu} | {platform.system()} {platform.release()} | numpy {np.__version__}"


def time_beamformer(
    design: Beamformer,
    instances: Sequence[CSISample],
    repetitions: int = MIN_REPETITIONS,
    clock: Clock | None = None,
    label: str = "beamformer",
) -> TimingStats:
    """Latency statistics of ``design`` over ``instances``.

    Raises:
        ValueError: With no instances or fewer than five repetitions.
    """
    if not instances:
        raise ValueError("benchmark needs at least one instance")
    if repetitions < MIN_REPETITIONS:
        raise ValueError(f"benchmark needs at least {MIN_REPETITIONS} repetitions")
    clock = clock or PerfCounterClock()

    design(instances[0])
    per_rep: list[float] = []
    for _ in range(repetitions):
        elapsed = 0.0
        for sample in instances:
            start = clock.monotonic()
            design(sample)
            elapsed += clock.monotonic() - start
        per_rep.append(max(elapsed, 0.0) / len(instances))

    stats = TimingStats(
        method=label,
        instances=len(instances),
        repetitions=repetitions,
        median_s=float(np.median(per_rep)),
        mean_s=float(np.mean(per_rep)),
        std_s=float(np.std(per_rep)),
        min_s=float(np.min(per_rep)),
        hardware=hardware_descriptor(),
    )
    logger.info("benchmark_completed", method=label, median_s=stats.median_s)
    return stats


def bench_timing(
    method: Method,
    instances: Sequence[CSISample],
    repetitions: int = MIN_REPETITIONS,
    *,
    spec: ExperimentSpec,
    net: TrainedNet | None = None,
    oau_iterations: int | None = None,
    clock: Clock | None = None,
) -> TimingStats:
    """Per-instance wall-time statistics of one method.

    ``oau_iterations`` adds online adaptation to a network method and is
    reflected in the reported method label.
    """
    design = make_beamformer(method, spec, net, oau_iterations)
    label = str(method) if not oau_iterations else f"{method}+oau{oau_iterations}"
    return time_beamformer(design, instances, repetitions, clock, label)
