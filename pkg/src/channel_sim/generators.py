"""
Small-scale channel generators.

Every generator is a pure function of its inputs and the generator state.
Blocks are ``N x M``: rows are user antennas, columns AP antennas.
"""

from __future__ import annotations

import math

import numpy as np
import structlog
from joblib import Parallel, delayed

from src.channel_sim.geometry import Geometry, place_nodes, steering_vector
from src.models.enums import ChannelModel
from src.models.scenario import CSISample, PeriodSpec, ScenarioConfig

logger = structlog.get_logger(__name__)


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Circularly symmetric complex Gaussian entries of unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _angles(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=count)


def gen_multipath(
    q: int, i: int, geometry: Geometry, paths: int, rng: np.random.Generator
) -> np.ndarray:
    """Geometric multi-path block ``beta * sum_p g_p/sqrt(P) * a_r(phi_p) a_t(psi_p)^H``."""
    if paths < 1:
        raise ValueError("multipath channel needs at least one path")
    n, m = geometry.antennas_per_user, geometry.antennas_per_ap
    phi = _angles(rng, paths)
    psi = _angles(rng, paths)
    gains = complex_normal(rng, (paths,))
    a_r = np.hstack([steering_vector(a, n) for a in phi])
    a_t = np.hstack([steering_vector(a, m) for a in psi])
    h = (a_r * (gains / math.sqrt(paths))) @ a_t.conj().T
    return geometry.beta(q, i) * h


def gen_rician(
    q: int, i: int, geometry: Geometry, rice_factor: float, rng: np.random.Generator
) -> np.ndarray:
    """Rice block with LoS power fraction ``eps/(eps+1)``; ``eps=0`` is Rayleigh."""
    if rice_factor < 0:
        raise ValueError("Rice factor must be non-negative")
    n, m = geometry.antennas_per_user, geometry.antennas_per_ap
    phi, psi = _angles(rng, 2)
    scatter = complex_normal(rng, (n, m))
    los = steering_vector(phi, n) @ steering_vector(psi, m).conj().T
    los_amp = math.sqrt(rice_factor / (rice_factor + 1.0))
    nlos_amp = math.sqrt(1.0 / (rice_factor + 1.0))
    h = los_amp * los + nlos_amp * scatter
    return geometry.beta(q, i) * h


def gen_channel(period: PeriodSpec, geometry: Geometry, rng: np.random.Generator) -> np.ndarray:
    """Full ``(I*N, Q*M)`` channel of one sample, blocks drawn user-major then AP."""
    n, m = geometry.antennas_per_user, geometry.antennas_per_ap
    h = np.empty((geometry.num_users * n, geometry.num_aps * m), dtype=np.complex128)
    for i in range(geometry.num_users):
        for q in range(geometry.num_aps):
            if period.channel_model == ChannelModel.MULTIPATH:
                block = gen_multipath(q, i, geometry, period.paths, rng)
            else:
                block = gen_rician(q, i, geometry, period.effective_rice_factor, rng)
            h[i * n : (i + 1) * n, q * m : (q + 1) * m] = block
    return h


def sample_rng(seed: int, period_index: int, sample_index: int) -> np.random.Generator:
    """Independent stream per (seed, period, sample)."""
    return np.random.default_rng([seed, period_index, sample_index])


def generate_sample(
    scenario: ScenarioConfig, period: PeriodSpec, period_index: int, sample_index: int
) -> CSISample:
    """One CSI sample with freshly placed nodes."""
    rng = sample_rng(scenario.seed, period_index, sample_index)
    aps, users = place_nodes(period.num_aps, period.num_users, scenario.area_side, rng)
    geometry = Geometry.from_scenario(scenario, aps, users)
    return CSISample(
        H=gen_channel(period, geometry, rng),
        period_index=period_index,
        channel_model_label=period.label,
        noise_power=scenario.noise_power,
        num_aps=period.num_aps,
        num_users=period.num_users,
    )


def generate_samples(
    period: PeriodSpec,
    scenario: ScenarioConfig,
    period_index: int,
    count: int | None = None,
    n_jobs: int = 1,
) -> list[CSISample]:
    """Generate a period's samples in memory.

    Each sample owns its own stream, so thread-parallel and serial generation
    give identical values.
    """
    total = period.sample_count if count is None else count
    if n_jobs == 1:
        samples = [generate_sample(scenario, period, period_index, k) for k in range(total)]
    else:
        samples = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(generate_sample)(scenario, period, period_index, k) for k in range(total)
        )
    logger.debug(
        "period_samples_generated",
        period=period_index,
        channel_model=str(period.channel_model),
        count=total,
    )
    return list(samples)
