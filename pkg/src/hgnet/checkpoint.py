"""
Model checkpoints.

A checkpoint directory holds ``manifest.json`` (configuration echo, class ids
and block table) and ``params.bin``, every parameter block and BN running
statistic as little-endian float64 values in declared order.
"""

from __future__ import annotations

from collections.abc import Iterator
from pathlib import Path

import numpy as np
import structlog
from pydantic import ValidationError

from src.core.errors import PersistenceError
from src.hgnet.params import HGNetParams, init_params
from src.models.network import (
    CHECKPOINT_FORMAT_VERSION,
    CheckpointBlock,
    CheckpointManifest,
    HGNetConfig,
)

logger = structlog.get_logger(__name__)

MANIFEST_NAME = "manifest.json"
PARAMS_NAME = "params.bin"
PARAM_DTYPE = "<f8"


def _blocks(params: HGNetParams) -> Iterator[tuple[str, np.ndarray]]:
    for index, layer in enumerate(params.layers, start=1):
        for group in layer.groups():
            yield group.name, group.values.data
        yield f"layer{index}.running_mean", layer.bn.running_mean
        yield f"layer{index}.running_var", layer.bn.running_var


def save_checkpoint(params: HGNetParams, cfg: HGNetConfig, directory: Path) -> Path:
    """Write ``params`` to ``directory``, creating it if needed.

    Raises:
        PersistenceError: If the files cannot be written.
    """
    blocks: list[CheckpointBlock] = []
    arrays: list[np.ndarray] = []
    offset = 0
    for name, data in _blocks(params):
        blocks.append(
            CheckpointBlock(name=name, shape=list(data.shape), offset=offset, count=data.size)
        )
        arrays.append(np.ravel(data).astype(PARAM_DTYPE))
        offset += data.size

    manifest = CheckpointManifest(
        config=cfg,
        class_ids=params.class_ids,
        bn_batches_seen=[layer.bn.batches_seen for layer in params.layers],
        blocks=blocks,
    )
    try:
        directory.mkdir(parents=True, exist_ok=True)
        (directory / PARAMS_NAME).write_bytes(np.concatenate(arrays).tobytes())
        (directory / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))
    except OSError as exc:
        raise PersistenceError(f"cannot write checkpoint to {directory}: {exc}") from exc
    logger.info("checkpoint_saved", path=str(directory), values=offset)
    return directory


def load_checkpoint(directory: Path) -> tuple[HGNetParams, HGNetConfig]:
    """Read a checkpoint written by ``save_checkpoint``.

    Raises:
        PersistenceError: If files are missing, malformed or inconsistent.
    """
    try:
        manifest = CheckpointManifest.model_validate_json(
            (directory / MANIFEST_NAME).read_text()
        )
        raw = (directory / PARAMS_NAME).read_bytes()
    except (OSError, ValidationError) as exc:
        raise PersistenceError(f"cannot read checkpoint at {directory}: {exc}") from exc
    if manifest.format_version != CHECKPOINT_FORMAT_VERSION:
        raise PersistenceError(f"unsupported checkpoint version {manifest.format_version}")

    values = np.frombuffer(raw, dtype=PARAM_DTYPE)
    expected = sum(block.count for block in manifest.blocks)
    if values.size != expected or len(raw) % 8:
        raise PersistenceError(f"{PARAMS_NAME} holds {values.size} values, expected {expected}")

    cfg = manifest.config
    params = init_params(cfg)
    params.class_ids = list(manifest.class_ids)
    table = {block.name: block for block in manifest.blocks}
    for name, target in _blocks(params):
        block = table.get(name)
        if block is None or tuple(block.shape) != target.shape:
            raise PersistenceError(f"checkpoint block {name} is missing or has the wrong shape")
        target[...] = values[block.offset : block.offset + block.count].reshape(target.shape)
    for layer, seen in zip(params.layers, manifest.bn_batches_seen, strict=True):
        layer.bn.batches_seen = seen
    logger.info("checkpoint_loaded", path=str(directory), values=expected)
    return params, cfg
