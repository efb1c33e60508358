"""
Experiment orchestration.

An experiment gathers training data, trains (or loads) the networks its
methods need, then evaluates every method on every channel family and
network size. Cells are independent and may run on worker threads; rows are
assembled in a fixed order so tables only differ in wall-time columns.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import structlog
from joblib import Parallel, delayed

from src.baselines.mrt import mrt_baseline
from src.baselines.wmmse import wmmse_solve
from src.channel_sim.dataset import load_dataset
from src.channel_sim.generators import generate_samples
from src.core.errors import ConfigError, FeasibilityError
from src.core.time import Clock, PerfCounterClock
from src.hgnet.checkpoint import load_checkpoint
from src.hgnet.model import feature_batches, infer_beams
from src.hgnet.params import HGNetParams, init_params
from src.hgnet.train import TrainResult, train
from src.metrics.mmd import source_gap_diag, target_gap_diag
from src.metrics.power import is_feasible
from src.metrics.rates import sum_rate
from src.models.adaptation import AdaptationReport, OAUConfig
from src.models.diagnostics import LayerGap, MMDConfig
from src.models.enums import ChannelModel, DatasetSplit, Method
from src.models.experiment import ExperimentSpec, ResultRow
from src.models.network import HGNetConfig
from src.models.scenario import CSISample, PeriodSpec
from src.oau.adapter import adapt, adapt_batch

logger = structlog.get_logger(__name__)

# Period indices of in-memory evaluation cells start here, away from dataset periods.
EVAL_PERIOD_OFFSET = 1000

Beamformer = Callable[[CSISample], np.ndarray]


@dataclass(slots=True)
class TrainedNet:
    """A network ready for inference."""

    params: HGNetParams
    cfg: HGNetConfig
    history: TrainResult | None = None


@dataclass(slots=True)
class ExperimentResult:
    """Rows and artifacts of one experiment run."""

    rows: list[ResultRow]
    nets: dict[Method, TrainedNet] = field(default_factory=dict)


@dataclass(slots=True)
class _Cell:
    method: Method
    channel_model: ChannelModel
    size: tuple[int, int]
    oau_iterations: int | None
    samples: list[CSISample]


def make_beamformer(
    method: Method,
    spec: ExperimentSpec,
    net: TrainedNet | None = None,
    oau_iterations: int | None = None,
) -> Beamformer:
    """Per-sample beam designer for ``method``.

    Raises:
        ConfigError: If a network method is requested without a network.
    """
    p_max = spec.scenario.p_max
    if method == Method.WMMSE:
        return lambda s: wmmse_solve(
            s.H, p_max, s.noise_power, spec.wmmse, num_aps=s.num_aps, num_users=s.num_users
        ).beams
    if method == Method.MRT:
        return lambda s: mrt_baseline(s.H, p_max, num_aps=s.num_aps, num_users=s.num_users)
    if net is None:
        raise ConfigError(f"method {method} needs a trained network")
    if oau_iterations:
        oau = spec.oau.model_copy(update={"iterations": oau_iterations})
        return lambda s: adapt(net.params, net.cfg, oau, s).beams
    return lambda s: infer_beams(net.params, net.cfg, [s])[0]


def training_samples(spec: ExperimentSpec, n_jobs: int = 1) -> list[CSISample]:
    """Training split, read from ``spec.dataset_dir`` or generated in memory."""
    if spec.dataset_dir is not None:
        periods = load_dataset(Path(spec.dataset_dir), split=DatasetSplit.TRAIN)
        return [s for k in sorted(periods) for s in periods[k]]
    samples: list[CSISample] = []
    for index, period in spec.scenario.periods_for(DatasetSplit.TRAIN):
        samples.extend(generate_samples(period, spec.scenario, index, n_jobs=n_jobs))
    return samples


def prepare_networks(
    spec: ExperimentSpec, samples: Sequence[CSISample] | None = None, n_jobs: int = 1
) -> dict[Method, TrainedNet]:
    """Load or train every network the experiment's methods need."""
    nets: dict[Method, TrainedNet] = {}
    if not spec.needs_network:
        return nets
    wanted = {m for m in spec.methods if m in (Method.HGNET, Method.HGNET_NO_G)}
    if spec.h_sweep:
        wanted.add(Method.HGNET)

    if Method.HGNET in wanted and spec.checkpoint is not None:
        params, cfg = load_checkpoint(Path(spec.checkpoint))
        nets[Method.HGNET] = TrainedNet(params=params, cfg=cfg)
        wanted.discard(Method.HGNET)
    if not wanted:
        return nets

    data = list(samples) if samples is not None else training_samples(spec, n_jobs)
    if not data:
        raise ConfigError("the experiment has no training periods and no checkpoint")
    for method in sorted(wanted):
        cfg = spec.net if method == Method.HGNET else spec.net.without_generalization()
        params = init_params(cfg, seed=cfg.train.seed)
        history = train(params, cfg, data)
        nets[method] = TrainedNet(params=params, cfg=cfg, history=history)
    return nets


def eval_period(
    spec: ExperimentSpec, channel_model: ChannelModel, size: tuple[int, int]
) -> PeriodSpec:
    """Evaluation period for one cell, reusing the Rice factor of a matching test period."""
    rice = None
    for period in spec.scenario.periods:
        if period.channel_model == channel_model:
            rice = period.rice_factor
            if period.split == DatasetSplit.TEST:
                break
    return PeriodSpec(
        num_aps=size[0],
        num_users=size[1],
        channel_model=channel_model,
        rice_factor=rice,
        sample_count=spec.eval_samples,
        split=DatasetSplit.TEST,
    )


def eval_channels(spec: ExperimentSpec) -> list[ChannelModel]:
    """Families to evaluate: explicit list, else the test periods', else all periods'."""
    if spec.eval_channels:
        return list(spec.eval_channels)
    test = [p.channel_model for _, p in spec.scenario.periods_for(DatasetSplit.TEST)]
    families = test or [p.channel_model for p in spec.scenario.periods]
    return list(dict.fromkeys(families))


def _cells(spec: ExperimentSpec) -> list[_Cell]:
    cells: list[_Cell] = []
    for c_index, channel_model in enumerate(eval_channels(spec)):
        for s_index, size in enumerate(spec.eval_sizes):
            period = eval_period(spec, channel_model, size)
            period_index = EVAL_PERIOD_OFFSET + c_index * len(spec.eval_sizes) + s_index
            samples = generate_samples(period, spec.scenario, period_index)
            for method in spec.methods:
                cells.append(_Cell(method, channel_model, size, None, samples))
            for h in spec.h_sweep:
                cells.append(_Cell(Method.HGNET, channel_model, size, h, samples))
    return cells


def evaluate_cell(
    cell: _Cell,
    spec: ExperimentSpec,
    nets: dict[Method, TrainedNet],
    clock: Clock | None = None,
) -> ResultRow:
    """Run one method over one cell's samples and summarize.

    Raises:
        FeasibilityError: If any emitted beamformer exceeds the power budget.
    """
    clock = clock or PerfCounterClock()
    design = make_beamformer(cell.method, spec, nets.get(cell.method), cell.oau_iterations)
    rates, times = [], []
    for sample in cell.samples:
        start = clock.monotonic()
        beams = design(sample)
        times.append(max(clock.monotonic() - start, 0.0))
        if not is_feasible(beams, spec.scenario.p_max):
            raise FeasibilityError(
                f"{cell.method} beams exceed the per-AP budget at size {cell.size}"
            )
        rates.append(sum_rate(sample.H, beams, sample.noise_power))
    return ResultRow(
        method=cell.method,
        channel_model=cell.channel_model,
        num_aps=cell.size[0],
        num_users=cell.size[1],
        oau_iterations=cell.oau_iterations,
        mean_sum_rate=float(np.mean(rates)),
        std_sum_rate=float(np.std(rates)),
        mean_wall_s=float(np.mean(times)),
        sample_count=len(rates),
        seed=spec.scenario.seed,
    )


def run_experiment(
    spec: ExperimentSpec,
    n_jobs: int = 1,
    nets: dict[Method, TrainedNet] | None = None,
    clock: Clock | None = None,
) -> ExperimentResult:
    """Evaluate every requested method on every channel family and size.

    Args:
        spec: Experiment description.
        n_jobs: Worker threads for evaluation cells.
        nets: Networks prepared beforehand; trained or loaded here when omitted.
        clock: Time source for wall-time columns.

    Raises:
        ConfigError: If referenced inputs are missing.
    """
    for label, ref in (("dataset", spec.dataset_dir), ("checkpoint", spec.checkpoint)):
        if ref is not None and not Path(ref).exists():
            raise ConfigError(f"{label} path {ref} does not exist")

    logger.info("experiment_started", name=spec.name, methods=[str(m) for m in spec.methods])
    if nets is None:
        nets = prepare_networks(spec, n_jobs=n_jobs)
    cells = _cells(spec)
    rows = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(evaluate_cell)(cell, spec, nets, clock) for cell in cells
    )
    logger.info("experiment_completed", name=spec.name, rows=len(rows))
    return ExperimentResult(rows=list(rows), nets=nets)


def mmd_diagnostics(
    net: TrainedNet,
    sources: Sequence[Sequence[CSISample]],
    target: Sequence[CSISample] | None = None,
    cfg: MMDConfig | None = None,
) -> list[LayerGap]:
    """Per-layer source gap, and target gap when target samples are given."""
    source_features = [feature_batches(net.params, net.cfg, list(s)) for s in sources]
    target_features = (
        feature_batches(net.params, net.cfg, list(target)) if target is not None else None
    )
    gaps: list[LayerGap] = []
    for layer in range(net.cfg.num_layers - 1):
        per_source = [features[layer] for features in source_features]
        target_gap = None
        if target_features is not None:
            target_gap = target_gap_diag(per_source, target_features[layer], cfg)
        gaps.append(
            LayerGap(
                layer=layer + 1,
                source_gap=source_gap_diag(per_source, cfg),
                target_gap=target_gap,
            )
        )
    return gaps


def oau_reports(
    spec: ExperimentSpec, net: TrainedNet, samples: Sequence[CSISample], iterations: int
) -> list[AdaptationReport]:
    """Adaptation reports for ``samples`` at a given iteration count."""
    oau: OAUConfig = spec.oau.model_copy(update={"iterations": iterations})
    return [r.report for r in adapt_batch(net.params, net.cfg, oau, samples)]
