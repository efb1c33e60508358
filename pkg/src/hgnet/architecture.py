"""
Architecture rules and the modulus input transform.

A layer keeps the spatial size either with unit strides and
``p = (k - 1) / 2`` or, for a declared input size ``W``, with strides above one
and ``p = ((s - 1) W - s + k) / 2``. The last layer must emit ``2M`` planes so
that its output splits into real and imaginary beam parts.
"""

from __future__ import annotations

import numpy as np
import structlog

from src.core.errors import ShapeError
from src.models.network import (
    ArchitectureReport,
    ArchitectureViolation,
    HGNetConfig,
    LayerSpec,
)

logger = structlog.get_logger(__name__)


def preserving_padding(kernel: int, stride: int, size: int | None = None) -> float | None:
    """Padding that keeps an axis of length ``size`` unchanged, possibly fractional.

    Returns None when a strided layer is asked about without a size.
    """
    if stride == 1:
        return (kernel - 1) / 2
    if size is None:
        return None
    return ((stride - 1) * size - stride + kernel) / 2


def _axis_violation(
    index: int, axis: str, kernel: int, stride: int, pad: int, size: int | None
) -> ArchitectureViolation | None:
    required = preserving_padding(kernel, stride, size)
    if required is None:
        return ArchitectureViolation(
            layer=index,
            condition="stride_padding",
            detail=f"{axis}: stride {stride} needs a declared input size",
        )
    condition = "padding_parity" if stride == 1 else "stride_padding"
    if not float(required).is_integer() or required < 0:
        return ArchitectureViolation(
            layer=index,
            condition=condition,
            detail=f"{axis}: preserving padding {required} is not a non-negative integer",
        )
    if int(required) != pad:
        return ArchitectureViolation(
            layer=index,
            condition=condition,
            detail=f"{axis}: padding {pad} differs from the preserving value {int(required)}",
        )
    return None


def _layer_violations(
    index: int, layer: LayerSpec, declared: tuple[int, int] | None
) -> list[ArchitectureViolation]:
    unit = (layer.stride_w == 1, layer.stride_h == 1)
    if unit[0] != unit[1]:
        return [
            ArchitectureViolation(
                layer=index,
                condition="mixed_stride",
                detail=f"strides ({layer.stride_w}, {layer.stride_h}) mix 1 and >1",
            )
        ]
    width, height = declared if declared is not None else (None, None)
    found = [
        _axis_violation(index, "w", layer.kernel_w, layer.stride_w, layer.pad_w, width),
        _axis_violation(index, "h", layer.kernel_h, layer.stride_h, layer.pad_h, height),
    ]
    return [v for v in found if v is not None]


def validate_architecture(
    cfg: HGNetConfig, antennas_per_ap: int | None = None
) -> ArchitectureReport:
    """Check every layer for spatial-size preservation and the output channel rule.

    Args:
        cfg: Network configuration.
        antennas_per_ap: M; defaults to ``cfg.antennas_per_ap``.

    Returns:
        A report listing every violation. Never raises for a bad layout.
    """
    m = cfg.antennas_per_ap if antennas_per_ap is None else antennas_per_ap
    violations: list[ArchitectureViolation] = []

    if cfg.num_layers < 2:
        violations.append(
            ArchitectureViolation(layer=None, condition="layer_count", detail="L must be >= 2")
        )

    for index, layer in enumerate(cfg.layers, start=1):
        violations.extend(_layer_violations(index, layer, cfg.declared_input))

    final = cfg.layers[-1].channels
    if final != 2 * m:
        violations.append(
            ArchitectureViolation(
                layer=cfg.num_layers,
                condition="output_channels",
                detail=f"final layer has {final} channels, expected 2M = {2 * m}",
            )
        )

    for index, layer in enumerate(cfg.layers[:-1], start=1):
        discard = cfg.discard_count(layer.channels)
        if discard >= layer.channels:
            violations.append(
                ArchitectureViolation(
                    layer=index,
                    condition="discard_count",
                    detail=f"C_dis {discard} must be below the {layer.channels} layer channels",
                )
            )

    report = ArchitectureReport(ok=not violations, violations=violations)
    if not report.ok:
        logger.debug("architecture_rejected", violations=len(violations))
    return report


def input_transform(h: np.ndarray, antennas_per_ap: int, antennas_per_user: int) -> np.ndarray:
    """Elementwise modulus of a channel matrix laid out as a ``(Q, I, MN)`` tensor.

    Entry ``(n, m)`` of the block linking AP ``q`` and user ``i`` lands at
    ``[q, i, n * M + m]``.

    Raises:
        ShapeError: If the rows are not a multiple of N or the columns of M.
    """
    rows, cols = h.shape
    m, n = antennas_per_ap, antennas_per_user
    if rows % n or cols % m:
        raise ShapeError(f"channel {h.shape} is not divisible into {n}x{m} blocks")
    num_users, num_aps = rows // n, cols // m
    blocks = np.abs(h).reshape(num_users, n, num_aps, m)
    return np.ascontiguousarray(blocks.transpose(2, 0, 1, 3).reshape(num_aps, num_users, n * m))


def input_batch(
    channels: list[np.ndarray], antennas_per_ap: int, antennas_per_user: int
) -> np.ndarray:
    """Stack the transforms of equally sized channel matrices into ``(B, Q, I, MN)``."""
    return np.stack([input_transform(h, antennas_per_ap, antennas_per_user) for h in channels])
