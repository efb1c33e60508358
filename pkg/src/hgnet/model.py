"""
HGNet forward pass.

Every layer is convolution, batch normalization and an activation (ReLU for
hidden layers, tanh for the last). In train mode layers 1..L-1 are followed by
the high-generalization module; at inference the features pass through
unchanged. The output adds a fixed residual of the input, squashes it with
tanh and scales each AP onto its power budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog

from src.core.errors import ArchitectureError, ShapeError
from src.diffnum import (
    GradTape,
    TensorR,
    activation,
    add,
    batchnorm,
    conv2d,
    gap,
    project_power,
)
from src.hgnet.architecture import input_batch
from src.hgnet.generalization import (
    apply_mask,
    discriminator_loss,
    drop_probs,
    feature_scores,
    wrs_mask,
)
from src.hgnet.params import HGNetParams, LayerParams
from src.models.enums import ActivationKind, ForwardMode
from src.models.network import HGNetConfig
from src.models.scenario import CSISample

logger = structlog.get_logger(__name__)


@dataclass(slots=True)
class LayerTrace:
    """Intermediates of one layer; the module fields stay None where it did not run."""

    c: TensorR
    g: TensorR
    pooled: np.ndarray | None = None
    scores: np.ndarray | None = None
    probs: np.ndarray | None = None
    mask: np.ndarray | None = None
    logits: np.ndarray | None = None
    disc_loss: TensorR | None = None


@dataclass(slots=True)
class ForwardTrace:
    """Everything a forward pass produced.

    Attributes:
        layers: Per-layer intermediates.
        output: Projected real-stacked beams ``(B, Q, I, 2M)``.
        beams: Complex beams ``(B, Q, I, M)``.
    """

    layers: list[LayerTrace]
    output: TensorR
    beams: np.ndarray
    disc_losses: list[TensorR] = field(default_factory=list)

    @property
    def disc_loss(self) -> float:
        """Mean discriminator loss over layers, 0 when the module did not run."""
        if not self.disc_losses:
            return 0.0
        return float(np.mean([d.item() for d in self.disc_losses]))


def residual_projection(input_channels: int, output_channels: int) -> np.ndarray:
    """Fixed ``(MN, 2M)`` channel-averaging matrix for the residual branch.

    Output plane ``c`` averages the input planes overlapping the interval
    ``[c r, (c + 1) r)`` with ``r = MN / 2M``, weighted by overlap. Equal
    channel counts give the identity.
    """
    ratio = input_channels / output_channels
    weights = np.zeros((input_channels, output_channels))
    for c in range(output_channels):
        lo, hi = c * ratio, (c + 1) * ratio
        for k in range(int(np.floor(lo)), int(np.ceil(hi))):
            weights[k, c] = min(hi, k + 1) - max(lo, k)
        weights[:, c] /= weights[:, c].sum()
    return weights


def residual_input(x: np.ndarray, antennas_per_ap: int) -> np.ndarray:
    """Residual branch ``V_IM`` for a ``(B, Q, I, MN)`` input."""
    out_channels = 2 * antennas_per_ap
    if x.shape[-1] == out_channels:
        return x
    return x @ residual_projection(x.shape[-1], out_channels)


def assemble_output(
    c_last: TensorR,
    v_im: np.ndarray,
    cfg: HGNetConfig,
    tape: GradTape | None = None,
) -> tuple[TensorR, np.ndarray]:
    """Residual sum, tanh and per-AP power projection.

    Returns:
        The projected real-stacked tensor and the complex ``(B, Q, I, M)`` beams.

    Raises:
        ShapeError: If the branches disagree or the last axis is not ``2M``.
    """
    m = cfg.antennas_per_ap
    if c_last.shape != v_im.shape or c_last.shape[-1] != 2 * m:
        raise ShapeError(f"output {c_last.shape} and residual {v_im.shape} must be (.., 2M)")
    v_rea = activation(add(c_last, TensorR(v_im), tape), ActivationKind.TANH, tape)
    projected = project_power(v_rea, cfg.p_max, cfg.projection_mode, tape)
    beams = projected.data[..., :m] + 1j * projected.data[..., m:]
    return projected, beams


def forward(
    params: HGNetParams,
    cfg: HGNetConfig,
    x: np.ndarray,
    mode: ForwardMode = ForwardMode.INFER,
    rng: np.random.Generator | None = None,
    labels: np.ndarray | None = None,
    tape: GradTape | None = None,
    bn_mode: ForwardMode | None = None,
    update_stats: bool = True,
    generalize: bool | None = None,
) -> ForwardTrace:
    """Run the network on a ``(B, Q, I, MN)`` modulus batch.

    Args:
        params: Network parameters.
        cfg: Network configuration.
        x: Input batch from ``input_batch``.
        mode: Train attaches the generalization module; infer skips it.
        rng: Stream for the discard masks; required when planes are discarded.
        labels: Discriminator class indices, required when the module runs.
        tape: Gradient tape.
        bn_mode: Batch-norm mode; follows ``mode`` when omitted.
        update_stats: Whether train-mode batch norm folds batches into the running stats.
        generalize: Force the module on or off; defaults to train mode with
            the module enabled in ``cfg``.

    Raises:
        ArchitectureError: If a layer changes the spatial size.
    """
    if x.ndim != 4 or x.shape[-1] != cfg.input_channels:
        raise ShapeError(f"input {x.shape} is not (B, Q, I, {cfg.input_channels})")
    spatial = x.shape[1:3]
    bn_mode = mode if bn_mode is None else bn_mode
    if generalize is None:
        generalize = mode == ForwardMode.TRAIN and cfg.generalization_enabled
    if generalize and labels is None:
        raise ValueError("the generalization module needs class labels")

    traces: list[LayerTrace] = []
    disc_losses: list[TensorR] = []
    h = TensorR(x)
    last = cfg.num_layers - 1
    for index, (spec, layer) in enumerate(zip(cfg.layers, params.layers, strict=True)):
        c = conv2d(
            h,
            layer.kernels.values,
            layer.bias.values,
            stride=(spec.stride_w, spec.stride_h),
            padding=(spec.pad_w, spec.pad_h),
            tape=tape,
        )
        if c.shape[1:3] != spatial:
            raise ArchitectureError(
                f"layer {index + 1} maps spatial size {spatial} to {c.shape[1:3]}"
            )
        c = batchnorm(
            c,
            layer.gamma.values,
            layer.beta.values,
            layer.bn,
            mode=bn_mode,
            eps=cfg.bn_eps,
            tape=tape,
            update_stats=update_stats,
        )
        kind = ActivationKind.TANH if index == last else ActivationKind.RELU
        c = activation(c, kind, tape)

        trace = LayerTrace(c=c, g=c)
        if generalize and index < last:
            trace = _generalize(trace, layer, cfg, labels, rng, tape)
            if trace.disc_loss is not None:
                disc_losses.append(trace.disc_loss)
        traces.append(trace)
        h = trace.g

    output, beams = assemble_output(h, residual_input(x, cfg.antennas_per_ap), cfg, tape)
    logger.debug("forward_completed", mode=str(mode), batch=x.shape[0], size=spatial)
    return ForwardTrace(layers=traces, output=output, beams=beams, disc_losses=disc_losses)


def _generalize(
    trace: LayerTrace,
    layer: LayerParams,
    cfg: HGNetConfig,
    labels: np.ndarray | None,
    rng: np.random.Generator | None,
    tape: GradTape | None,
) -> LayerTrace:
    if labels is None or layer.disc_weights is None or layer.disc_bias is None:
        raise ValueError("the generalization module needs labels and a discriminator head")
    pooled = gap(trace.c, tape)
    loss, logits = discriminator_loss(
        pooled, layer.disc_weights.values, layer.disc_bias.values, labels, cfg.grl_lambda, tape
    )
    trace.pooled = pooled.data
    trace.logits = logits
    trace.disc_loss = loss

    discard = cfg.discard_count(trace.c.shape[-1])
    trace.scores = feature_scores(pooled.data, layer.disc_weights.values.data, labels)
    trace.probs = drop_probs(trace.scores)
    if discard > 0:
        if rng is None:
            raise ValueError("discarding feature planes needs a random generator")
        trace.mask = wrs_mask(trace.probs, discard, rng)
    else:
        trace.mask = np.ones(trace.probs.shape)
    trace.g = apply_mask(trace.c, trace.mask, tape)
    return trace


def infer_beams(params: HGNetParams, cfg: HGNetConfig, samples: list[CSISample]) -> np.ndarray:
    """Inference beams ``(B, Q, I, M)`` for samples of one network size."""
    x = input_batch([s.H for s in samples], cfg.antennas_per_ap, cfg.antennas_per_user)
    return forward(params, cfg, x, mode=ForwardMode.INFER).beams


def feature_batches(
    params: HGNetParams, cfg: HGNetConfig, samples: list[CSISample]
) -> list[np.ndarray]:
    """Inference-mode features ``G_l`` of layers 1..L-1, each ``(B, Q, I, C_l)``."""
    x = input_batch([s.H for s in samples], cfg.antennas_per_ap, cfg.antennas_per_user)
    trace = forward(params, cfg, x, mode=ForwardMode.INFER)
    return [layer.g.data for layer in trace.layers[:-1]]
