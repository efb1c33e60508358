"""
Unsupervised HGNet training.

The objective is ``-sum_rate + adv_weight * mean_l CE_l``. The rate term is
seeded on the network output through its analytic gradient and every
discriminator loss is seeded with ``adv_weight / (L - 1)``. Because of the
gradient reversal, the feature extractor ascends the discriminator loss while
the discriminator heads descend it.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import structlog

from src.core.errors import ArchitectureError, ConfigError, TrainingError
from src.diffnum import Adam, GradTape, TensorR
from src.hgnet.architecture import input_batch, validate_architecture
from src.hgnet.loss import batch_rate_loss
from src.hgnet.model import ForwardTrace, forward
from src.hgnet.params import HGNetParams
from src.models.enums import ForwardMode
from src.models.network import HGNetConfig
from src.models.scenario import CSISample

logger = structlog.get_logger(__name__)


@dataclass(slots=True)
class BatchLoss:
    """Objective of one batch and the seeds that back-propagate it."""

    total: float
    rate: float
    disc: float
    trace: ForwardTrace
    seeds: dict[TensorR, np.ndarray | float] = field(default_factory=dict)


@dataclass(slots=True)
class TrainResult:
    """Trained parameters and per-epoch mean losses."""

    params: HGNetParams
    epoch_loss: list[float] = field(default_factory=list)
    epoch_rate_loss: list[float] = field(default_factory=list)
    epoch_disc_loss: list[float] = field(default_factory=list)


def make_batches(
    samples: Sequence[CSISample], batch_size: int, rng: np.random.Generator | None = None
) -> list[list[CSISample]]:
    """Split samples into same-size batches, dropping batches of fewer than 2.

    With ``rng`` the samples of every size and the resulting batch order are
    shuffled across channel classes; without it the order is kept.
    """
    by_size: dict[tuple[int, int], list[CSISample]] = defaultdict(list)
    for sample in samples:
        by_size[(sample.num_aps, sample.num_users)].append(sample)

    batches: list[list[CSISample]] = []
    for size in sorted(by_size):
        group = by_size[size]
        order = rng.permutation(len(group)) if rng is not None else np.arange(len(group))
        for start in range(0, len(group), batch_size):
            batch = [group[k] for k in order[start : start + batch_size]]
            if len(batch) >= 2:
                batches.append(batch)
    if rng is not None:
        batches = [batches[k] for k in rng.permutation(len(batches))]
    return batches


def batch_loss(
    params: HGNetParams,
    cfg: HGNetConfig,
    batch: Sequence[CSISample],
    rng: np.random.Generator,
    tape: GradTape | None = None,
    update_stats: bool = True,
) -> BatchLoss:
    """Train-mode forward of one batch and its combined objective."""
    x = input_batch([s.H for s in batch], cfg.antennas_per_ap, cfg.antennas_per_user)
    labels = None
    if cfg.generalization_enabled:
        labels = params.class_index(np.array([s.channel_model_label for s in batch]))
    trace = forward(
        params,
        cfg,
        x,
        mode=ForwardMode.TRAIN,
        rng=rng,
        labels=labels,
        tape=tape,
        update_stats=update_stats,
    )
    rate, grad = batch_rate_loss([s.H for s in batch], trace.beams, batch[0].noise_power)
    disc = trace.disc_loss
    result = BatchLoss(total=rate + cfg.adv_weight * disc, rate=rate, disc=disc, trace=trace)
    result.seeds[trace.output] = grad
    if cfg.adv_weight > 0 and trace.disc_losses:
        weight = cfg.adv_weight / len(trace.disc_losses)
        for loss in trace.disc_losses:
            result.seeds[loss] = weight
    return result


def _check_ready(params: HGNetParams, cfg: HGNetConfig, samples: Sequence[CSISample]) -> None:
    report = validate_architecture(cfg)
    if not report.ok:
        details = "; ".join(f"layer {v.layer}: {v.detail}" for v in report.violations)
        raise ArchitectureError(f"invalid architecture: {details}")
    if not samples:
        raise ConfigError("training needs at least one sample")
    classes = sorted({s.channel_model_label for s in samples})
    if cfg.generalization_enabled and len(classes) != cfg.num_classes:
        raise ConfigError(
            f"training data has {len(classes)} channel classes, config declares {cfg.num_classes}"
        )
    if len(classes) == cfg.num_classes:
        params.class_ids = classes


def train(params: HGNetParams, cfg: HGNetConfig, samples: Sequence[CSISample]) -> TrainResult:
    """Train ``params`` in place on ``samples`` and recalibrate the running statistics.

    Raises:
        ArchitectureError: If the configuration fails validation.
        ConfigError: If the data does not match the declared class count.
        TrainingError: If the loss becomes non-finite; carries the epoch.
    """
    _check_ready(params, cfg, samples)
    params.set_trainable(affine_only=False)
    hp = cfg.train
    optimizer = Adam(params.groups(), lr=hp.learning_rate, beta1=hp.beta1, beta2=hp.beta2)
    result = TrainResult(params=params)
    logger.info(
        "training_started",
        samples=len(samples),
        epochs=hp.epochs,
        batch_size=hp.batch_size,
        classes=params.class_ids,
    )

    for epoch in range(hp.epochs):
        rng = np.random.default_rng([hp.seed, epoch])
        totals, rates, discs = [], [], []
        for batch in make_batches(samples, hp.batch_size, rng):
            tape = GradTape()
            loss = batch_loss(params, cfg, batch, rng, tape=tape)
            if not np.isfinite(loss.total):
                raise TrainingError("non-finite training loss", iteration=epoch)
            tape.backward(loss.seeds)
            for group in params.groups():
                group.collect(tape)
            optimizer.step()
            totals.append(loss.total)
            rates.append(loss.rate)
            discs.append(loss.disc)
        if not totals:
            raise ConfigError(f"no batch of at least 2 samples with batch size {hp.batch_size}")
        result.epoch_loss.append(float(np.mean(totals)))
        result.epoch_rate_loss.append(float(np.mean(rates)))
        result.epoch_disc_loss.append(float(np.mean(discs)))
        logger.info(
            "epoch_completed",
            epoch=epoch,
            mean_loss=result.epoch_loss[-1],
            mean_rate_loss=result.epoch_rate_loss[-1],
            mean_disc_loss=result.epoch_disc_loss[-1],
        )

    calibrate_running_stats(params, cfg, samples)
    return result


def calibrate_running_stats(
    params: HGNetParams,
    cfg: HGNetConfig,
    samples: Sequence[CSISample],
    batch_size: int | None = None,
) -> None:
    """Recompute every BN running statistic with the current weights and no mask.

    The statistics become the average of the mini-batch statistics over the
    dataset, visited in a fixed order.
    """
    for state in params.bn_states():
        state.reset()
    size = batch_size or cfg.train.batch_size
    batches = make_batches(samples, size)
    for batch in batches:
        x = input_batch([s.H for s in batch], cfg.antennas_per_ap, cfg.antennas_per_user)
        forward(params, cfg, x, mode=ForwardMode.TRAIN, generalize=False)
    logger.info("running_stats_calibrated", batches=len(batches))
