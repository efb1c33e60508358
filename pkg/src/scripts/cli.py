"""
CLI entry point for the beamforming lab.

Provides the 'hgnet-lab' command group: dataset generation, training,
evaluation, online adaptation sweeps, latency benchmarks and feature-gap
diagnostics. Every ``--config`` accepts a preset name (desk, full_scale,
oau_shift) or a path to an experiment JSON file.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import click
import structlog
from pydantic import TypeAdapter, ValidationError

from src.channel_sim.dataset import gen_dataset, load_dataset
from src.channel_sim.generators import generate_samples
from src.core.errors import ConfigError, LabError
from src.harness.bench import bench_timing
from src.harness.config import LabSettings, load_experiment, with_overrides
from src.harness.experiment import (
    TrainedNet,
    eval_channels,
    eval_period,
    mmd_diagnostics,
    oau_reports,
    prepare_networks,
    run_experiment,
)
from src.harness.report import emit_adaptation, emit_report, emit_timings
from src.hgnet.checkpoint import load_checkpoint, save_checkpoint
from src.models.diagnostics import LayerGap
from src.models.enums import DatasetSplit, Method, ReportFormat
from src.models.experiment import ExperimentSpec

logger = structlog.get_logger(__name__)


def configure_logging(level: str) -> None:
    """Configure structured console logging once per process."""
    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.ConsoleRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelNamesMapping().get(level.upper(), logging.INFO)
        ),
    )


@dataclass(slots=True)
class CliState:
    """Resolved global options shared by every subcommand."""

    settings: LabSettings
    report_format: ReportFormat
    threads: int

    def experiment(self, ref: str) -> ExperimentSpec:
        return with_overrides(load_experiment(ref), self.settings)


@contextmanager
def _reported_errors() -> Iterator[None]:
    """Turn lab and validation errors into a one-line message and exit code 1."""
    try:
        yield
    except (LabError, ValidationError, ValueError) as exc:
        logger.error("command_failed", error=str(exc))
        raise click.ClickException(str(exc).splitlines()[0]) from exc


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for item in text.split(","):
        q, _, i = item.strip().lower().partition("x")
        if not q.isdigit() or not i.isdigit():
            raise click.BadParameter(f"size {item!r} is not of the form QxI")
        sizes.append((int(q), int(i)))
    return sizes


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"{text!r} is not a comma-separated integer list") from exc


@click.group()
@click.option("--seed", type=int, default=None, help="Seed overriding every preset seed.")
@click.option(
    "--format",
    "report_format",
    type=click.Choice([f.value for f in ReportFormat]),
    default=None,
    help="Result table format.",
)
@click.option("--threads", type=int, default=None, help="Worker threads.")
@click.option("--log-level", default=None, help="Log level (DEBUG, INFO, WARNING).")
@click.pass_context
def main(
    ctx: click.Context,
    seed: int | None,
    report_format: str | None,
    threads: int | None,
    log_level: str | None,
) -> None:
    """
    HGNet beamforming lab.

    Examples:

        \\b
        # Generate the desk dataset and train on it
        hgnet-lab gen-data --config desk --out data/desk
        hgnet-lab train --config desk --data data/desk --out ckpt/desk

        \\b
        # Evaluate at unseen network sizes and sweep online adaptation
        hgnet-lab --format json eval --config desk --ckpt ckpt/desk --sizes 6x6,8x8
        hgnet-lab adapt --config oau_shift --ckpt ckpt/shift --H-sweep 0,5,10,15,20
    """
    overrides = {"seed": seed, "threads": threads, "log_level": log_level}
    with _reported_errors():
        settings = LabSettings(**{k: v for k, v in overrides.items() if v is not None})
    configure_logging(settings.log_level)
    ctx.obj = CliState(
        settings=settings,
        report_format=ReportFormat(report_format) if report_format else settings.report_format,
        threads=settings.threads,
    )


@main.command("gen-data")
@click.option("--config", "config_ref", required=True, help="Preset name or experiment JSON.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Dataset directory.")
@click.pass_obj
def gen_data(state: CliState, config_ref: str, out: Path) -> None:
    """Generate every period of the scenario into a dataset directory."""
    with _reported_errors():
        spec = state.experiment(config_ref)
        manifest = gen_dataset(spec.scenario, out, n_jobs=state.threads)
    click.echo(f"wrote {len(manifest.periods)} periods to {out}")


@main.command()
@click.option("--config", "config_ref", required=True, help="Preset name or experiment JSON.")
@click.option("--data", type=click.Path(path_type=Path), default=None, help="Dataset directory.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Checkpoint directory.")
@click.option("--no-generalization", is_flag=True, help="Train the HGNet w/o G ablation.")
@click.pass_obj
def train(
    state: CliState, config_ref: str, data: Path | None, out: Path, no_generalization: bool
) -> None:
    """Train HGNet on the training split and save a checkpoint."""
    method = Method.HGNET_NO_G if no_generalization else Method.HGNET
    with _reported_errors():
        spec = state.experiment(config_ref)
        if data is not None:
            spec = spec.model_copy(update={"dataset_dir": str(data)})
        spec = spec.model_copy(update={"methods": [method], "checkpoint": None, "h_sweep": []})
        net = prepare_networks(spec, n_jobs=state.threads)[method]
        save_checkpoint(net.params, net.cfg, out)
    history = net.history.epoch_loss if net.history else []
    click.echo(f"saved checkpoint to {out} ({len(history)} epochs)")


@main.command("eval")
@click.option("--config", "config_ref", required=True, help="Preset name or experiment JSON.")
@click.option("--ckpt", type=click.Path(path_type=Path), default=None, help="HGNet checkpoint.")
@click.option("--sizes", default=None, help="Comma-separated QxI sizes, e.g. 4x4,6x6.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report path.")
@click.pass_obj
def evaluate(
    state: CliState, config_ref: str, ckpt: Path | None, sizes: str | None, out: Path | None
) -> None:
    """Evaluate the configured methods on every channel family and size."""
    with _reported_errors():
        spec = state.experiment(config_ref)
        update: dict[str, object] = {"h_sweep": []}
        if ckpt is not None:
            update["checkpoint"] = str(ckpt)
        if sizes:
            update["eval_sizes"] = _parse_sizes(sizes)
        spec = ExperimentSpec.model_validate({**spec.model_dump(), **update})
        result = run_experiment(spec, n_jobs=state.threads)
        path = emit_report(result.rows, out or state.settings.output_dir, state.report_format)
    click.echo(f"wrote {len(result.rows)} rows to {path}")


@main.command()
@click.option("--config", "config_ref", required=True, help="Preset name or experiment JSON.")
@click.option("--ckpt", type=click.Path(path_type=Path), required=True, help="HGNet checkpoint.")
@click.option("--H-sweep", "h_sweep", default="0,5,10,15,20", help="Iteration counts.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory.")
@click.pass_obj
def adapt(state: CliState, config_ref: str, ckpt: Path, h_sweep: str, out: Path | None) -> None:
    """Sweep online adaptation iterations and log per-sample adaptation records."""
    sweep = _parse_ints(h_sweep)
    out_dir = out or state.settings.output_dir
    with _reported_errors():
        spec = state.experiment(config_ref)
        spec = ExperimentSpec.model_validate(
            {
                **spec.model_dump(),
                "checkpoint": str(ckpt),
                "methods": [Method.HGNET],
                "h_sweep": sweep,
            }
        )
        params, cfg = load_checkpoint(ckpt)
        net = TrainedNet(params=params, cfg=cfg)
        result = run_experiment(spec, n_jobs=state.threads, nets={Method.HGNET: net})
        path = emit_report(result.rows, out_dir, state.report_format)
        for index, channel_model in enumerate(eval_channels(spec)):
            size = spec.eval_sizes[0]
            samples = generate_samples(
                eval_period(spec, channel_model, size), spec.scenario, 2000 + index
            )
            for h in sweep:
                emit_adaptation(
                    oau_reports(spec, net, samples, h),
                    out_dir / f"adapt_{channel_model}_h{h:02d}.jsonl",
                )
    click.echo(f"wrote {len(result.rows)} rows to {path}")


@main.command()
@click.option("--config", "config_ref", required=True, help="Preset name or experiment JSON.")
@click.option("--ckpt", type=click.Path(path_type=Path), default=None, help="HGNet checkpoint.")
@click.option("--instances", type=int, default=20, show_default=True)
@click.option("--repetitions", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Timing JSON path.")
@click.pass_obj
def bench(
    state: CliState,
    config_ref: str,
    ckpt: Path | None,
    instances: int,
    repetitions: int,
    out: Path | None,
) -> None:
    """Time every configured method per sample on the first evaluation cell."""
    with _reported_errors():
        spec = state.experiment(config_ref)
        if ckpt is not None:
            spec = spec.model_copy(update={"checkpoint": str(ckpt)})
        nets = prepare_networks(spec, n_jobs=state.threads)
        period = eval_period(spec, eval_channels(spec)[0], spec.eval_sizes[0])
        samples = generate_samples(period, spec.scenario, 3000, count=instances)
        stats = [
            bench_timing(m, samples, repetitions, spec=spec, net=nets.get(m)) for m in spec.methods
        ]
        hgnet = nets.get(Method.HGNET)
        stats += [
            bench_timing(Method.HGNET, samples, repetitions, spec=spec, net=hgnet, oau_iterations=h)
            for h in spec.h_sweep
            if h > 0
        ]
        path = emit_timings(stats, out or state.settings.output_dir / "timings.json")
    for s in stats:
        click.echo(f"{s.method:>16}: median {s.median_s:.3e} s  mean {s.mean_s:.3e} s")
    click.echo(f"wrote timings to {path}")


@main.command("mmd-diag")
@click.option(
    "--config",
    "config_ref",
    default=None,
    help="Preset or experiment JSON whose mmd section sets bandwidth and estimator.",
)
@click.option("--ckpt", type=click.Path(path_type=Path), required=True, help="HGNet checkpoint.")
@click.option("--data", type=click.Path(path_type=Path), required=True, help="Dataset directory.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Diagnostics JSON.")
@click.pass_obj
def mmd_diag(
    state: CliState, config_ref: str | None, ckpt: Path, data: Path, out: Path | None
) -> None:
    """Per-layer feature gaps between source periods and against the test periods."""
    with _reported_errors():
        mmd_cfg = state.experiment(config_ref).mmd if config_ref is not None else None
        params, cfg = load_checkpoint(ckpt)
        sources = load_dataset(data, split=DatasetSplit.TRAIN)
        if len(sources) < 2:
            raise ConfigError("feature-gap diagnostics need at least two training periods")
        tests = load_dataset(data, split=DatasetSplit.TEST)
        target = [s for k in sorted(tests) for s in tests[k]] or None
        gaps = mmd_diagnostics(
            TrainedNet(params=params, cfg=cfg),
            [sources[k] for k in sorted(sources)],
            target,
            mmd_cfg,
        )
        payload = TypeAdapter(list[LayerGap]).dump_json(gaps, indent=2)
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_bytes(payload)
    click.echo(payload.decode())


__all__ = ["main"]


if __name__ == "__main__":
    main()
