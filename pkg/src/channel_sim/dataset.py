"""
Dataset persistence.

A dataset directory holds ``manifest.json`` and one ``period_XXX.bin`` file per
period. Each file is the period's samples concatenated, every sample a
row-major ``(I*N) x (Q*M)`` array of little-endian float64 (re, im) pairs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import structlog
from pydantic import ValidationError

from src.channel_sim.generators import generate_samples
from src.core.errors import PersistenceError
from src.models.enums import DatasetSplit
from src.models.scenario import (
    DATASET_FORMAT_VERSION,
    CSISample,
    DatasetManifest,
    PeriodManifest,
    ScenarioConfig,
)

logger = structlog.get_logger(__name__)

MANIFEST_NAME = "manifest.json"
WIRE_DTYPE = np.dtype("<c16")


def period_file_name(period_index: int) -> str:
    return f"period_{period_index:03d}.bin"


def gen_dataset(scenario: ScenarioConfig, out_dir: Path | str, n_jobs: int = 1) -> DatasetManifest:
    """Generate every period of ``scenario`` and write it to ``out_dir``.

    Regenerating with the same scenario is byte-identical.

    Raises:
        PersistenceError: If the directory or a file cannot be written.
    """
    root = Path(out_dir)
    entries: list[PeriodManifest] = []
    try:
        root.mkdir(parents=True, exist_ok=True)
        for k, period in enumerate(scenario.periods):
            samples = generate_samples(period, scenario, k, n_jobs=n_jobs)
            rows = period.num_users * scenario.antennas_per_user
            cols = period.num_aps * scenario.antennas_per_ap
            blob = np.stack([s.H for s in samples]).astype(WIRE_DTYPE).tobytes()
            name = period_file_name(k)
            (root / name).write_bytes(blob)
            entries.append(
                PeriodManifest(
                    period_index=k,
                    file=name,
                    num_aps=period.num_aps,
                    num_users=period.num_users,
                    rows=rows,
                    cols=cols,
                    sample_count=period.sample_count,
                    channel_model=period.channel_model,
                    label=period.label,
                    rice_factor=period.effective_rice_factor,
                    paths=period.paths,
                    split=period.split,
                    seed=scenario.seed,
                )
            )
            logger.info(
                "dataset_period_written",
                period=k,
                file=name,
                channel_model=str(period.channel_model),
                samples=period.sample_count,
                split=str(period.split),
            )
        manifest = DatasetManifest(
            antennas_per_ap=scenario.antennas_per_ap,
            antennas_per_user=scenario.antennas_per_user,
            noise_power=scenario.noise_power,
            p_max=scenario.p_max,
            seed=scenario.seed,
            periods=entries,
        )
        (root / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")
    except OSError as exc:
        raise PersistenceError(f"cannot write dataset to {root}: {exc}") from exc
    logger.info("dataset_written", path=str(root), periods=len(entries))
    return manifest


def load_manifest(data_dir: Path | str) -> DatasetManifest:
    """Read and validate ``manifest.json``."""
    path = Path(data_dir) / MANIFEST_NAME
    try:
        manifest = DatasetManifest.model_validate_json(path.read_text())
    except OSError as exc:
        raise PersistenceError(f"cannot read dataset manifest {path}: {exc}") from exc
    except ValidationError as exc:
        raise PersistenceError(f"invalid dataset manifest {path}: {exc}") from exc
    if manifest.format_version != DATASET_FORMAT_VERSION:
        raise PersistenceError(
            f"dataset format version {manifest.format_version} is not supported"
        )
    return manifest


def load_period(data_dir: Path | str, entry: PeriodManifest, noise_power: float) -> list[CSISample]:
    """Decode one period file into samples."""
    path = Path(data_dir) / entry.file
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise PersistenceError(f"cannot read period file {path}: {exc}") from exc
    expected = entry.sample_count * entry.rows * entry.cols * WIRE_DTYPE.itemsize
    if len(raw) != expected:
        raise PersistenceError(f"{path} holds {len(raw)} bytes, manifest implies {expected}")
    blocks = np.frombuffer(raw, dtype=WIRE_DTYPE).astype(np.complex128)
    blocks = blocks.reshape(entry.sample_count, entry.rows, entry.cols)
    return [
        CSISample(
            H=blocks[k].copy(),
            period_index=entry.period_index,
            channel_model_label=entry.label,
            noise_power=noise_power,
            num_aps=entry.num_aps,
            num_users=entry.num_users,
        )
        for k in range(entry.sample_count)
    ]


def load_dataset(
    data_dir: Path | str, split: DatasetSplit | None = None
) -> dict[int, list[CSISample]]:
    """Load all periods (optionally one split) keyed by period index."""
    manifest = load_manifest(data_dir)
    loaded = {
        entry.period_index: load_period(data_dir, entry, manifest.noise_power)
        for entry in manifest.periods
        if split is None or entry.split == split
    }
    logger.info(
        "dataset_loaded",
        path=str(data_dir),
        periods=len(loaded),
        samples=sum(len(v) for v in loaded.values()),
    )
    return loaded
