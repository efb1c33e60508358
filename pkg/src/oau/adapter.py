"""
Online adaptive updating.

For each test channel the network runs with fixed running statistics, the
entropy of its output is back-propagated to the BN scale and shift of every
layer, and only those values are stepped. Convolution kernels, discriminator
heads and running statistics never change.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import structlog

from src.core.time import Clock, PerfCounterClock
from src.diffnum import Adam, GradTape
from src.hgnet.architecture import input_batch
from src.hgnet.model import forward
from src.hgnet.params import HGNetParams, count_parameters
from src.metrics.rates import sum_rate
from src.models.adaptation import (
    AdaptationReport,
    GroupDelta,
    IterationRecord,
    OAUConfig,
    ParamDeltaReport,
)
from src.models.enums import ForwardMode, ResetPolicy
from src.models.network import HGNetConfig
from src.models.scenario import CSISample
from src.oau.entropy import entropy_objective

logger = structlog.get_logger(__name__)


@dataclass(slots=True)
class AdaptResult:
    """Adapted beams of one sample with its report and the adapted parameters."""

    beams: np.ndarray
    report: AdaptationReport
    params: HGNetParams


def adaptation_step(
    params: HGNetParams, cfg: HGNetConfig, x: np.ndarray, optimizer: Adam
) -> tuple[float, np.ndarray]:
    """One entropy descent step on the affine groups.

    Returns:
        The entropy and complex beams of the forward pass taken before the step.
    """
    tape = GradTape()
    trace = forward(params, cfg, x, mode=ForwardMode.INFER, tape=tape)
    loss = entropy_objective(trace.output, cfg.antennas_per_ap, tape)
    value = loss.item()
    if not np.isfinite(value):
        return value, trace.beams
    tape.backward(loss)
    for group in optimizer.groups:
        group.collect(tape)
    optimizer.step()
    return value, trace.beams


def adapt(
    params: HGNetParams,
    cfg_net: HGNetConfig,
    cfg_oau: OAUConfig,
    sample: CSISample,
    *,
    sample_index: int = 0,
    clock: Clock | None = None,
    in_place: bool = False,
) -> AdaptResult:
    """Adapt the BN affine values to one channel and return its beams.

    Args:
        params: Trained parameters with populated running statistics.
        cfg_net: Network configuration.
        cfg_oau: Iteration count, learning rate and optimizer moments.
        sample: Test channel.
        sample_index: Index recorded in the report.
        clock: Time source for per-iteration wall time.
        in_place: Adapt ``params`` itself instead of a private copy.

    Returns:
        Beams ``(Q, I, M)``, the report and the adapted parameters. A
        non-finite entropy stops the loop, keeps the last finite values and
        flags the report.
    """
    clock = clock or PerfCounterClock()
    adapted = params if in_place else params.copy()
    adapted.set_trainable(affine_only=True)
    affine = adapted.affine_groups()
    optimizer = Adam(affine, lr=cfg_oau.learning_rate, beta1=cfg_oau.beta1, beta2=cfg_oau.beta2)
    x = input_batch([sample.H], cfg_net.antennas_per_ap, cfg_net.antennas_per_user)

    records: list[IterationRecord] = []
    aborted, error = False, None
    for h in range(1, cfg_oau.iterations + 1):
        snapshot = [g.values.data.copy() for g in affine]
        start = clock.monotonic()
        entropy, beams = adaptation_step(adapted, cfg_net, x, optimizer)
        elapsed_ms = (clock.monotonic() - start) * 1e3
        stepped = all(np.all(np.isfinite(g.values.data)) for g in affine)
        if not np.isfinite(entropy) or not stepped:
            for group, values in zip(affine, snapshot, strict=True):
                group.values.data[...] = values
            aborted, error = True, f"non-finite entropy at iteration {h}"
            logger.warning("adaptation_aborted", sample=sample_index, iteration=h)
            break
        records.append(
            IterationRecord(
                h=h,
                entropy=entropy,
                sum_rate_bits=sum_rate(sample.H, beams[0], sample.noise_power),
                wall_ms=max(elapsed_ms, 0.0),
            )
        )

    final = forward(adapted, cfg_net, x, mode=ForwardMode.INFER).beams[0]
    census = count_parameters(adapted)
    report = AdaptationReport(
        sample_index=sample_index,
        iterations=records,
        touched_fraction=census.affine_fraction,
        final_sum_rate_bits=sum_rate(sample.H, final, sample.noise_power),
        aborted=aborted,
        error=error,
    )
    logger.debug(
        "sample_adapted",
        sample=sample_index,
        iterations=len(records),
        final_sum_rate=report.final_sum_rate_bits,
    )
    return AdaptResult(beams=final, report=report, params=adapted)


def adapt_batch(
    params: HGNetParams,
    cfg_net: HGNetConfig,
    cfg_oau: OAUConfig,
    samples: Sequence[CSISample],
    clock: Clock | None = None,
) -> Iterator[AdaptResult]:
    """Adapt a sequence of samples under the configured reset policy.

    Per-sample resets start every sample from ``params``; persistent mode
    carries the adapted affine values from one sample to the next. ``params``
    itself is never modified.
    """
    carried = params.copy() if cfg_oau.reset_policy == ResetPolicy.PERSISTENT else None
    for index, sample in enumerate(samples):
        if carried is None:
            yield adapt(params, cfg_net, cfg_oau, sample, sample_index=index, clock=clock)
        else:
            yield adapt(
                carried, cfg_net, cfg_oau, sample, sample_index=index, clock=clock, in_place=True
            )


def param_delta_report(before: HGNetParams, after: HGNetParams) -> ParamDeltaReport:
    """Per-group maximum absolute change between two parameter sets.

    Running statistics are compared as non-affine groups.

    Raises:
        ValueError: If the two sets do not share an architecture.
    """
    old = _named_blocks(before)
    new = _named_blocks(after)
    if [(n, a.shape) for n, a, _ in old] != [(n, a.shape) for n, a, _ in new]:
        raise ValueError("parameter sets have different architectures")

    deltas = [
        GroupDelta(
            group=name, max_abs_delta=float(np.max(np.abs(b - a), initial=0.0)), affine=aff
        )
        for (name, a, aff), (_, b, _) in zip(old, new, strict=True)
    ]
    census = count_parameters(before)
    return ParamDeltaReport(
        groups=deltas,
        touched_fraction=census.affine_fraction,
        affine_values=census.affine,
        total_values=census.total,
    )


def _named_blocks(params: HGNetParams) -> list[tuple[str, np.ndarray, bool]]:
    blocks = [(g.name, g.values.data, g.affine) for g in params.groups()]
    for index, state in enumerate(params.bn_states(), start=1):
        blocks.append((f"layer{index}.running_mean", state.running_mean, False))
        blocks.append((f"layer{index}.running_var", state.running_var, False))
    return blocks
