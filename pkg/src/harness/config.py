"""
Lab settings and experiment presets.

Environment settings use the ``HGNET_`` prefix and may come from a ``.env``
file. CLI flags override settings, and settings override preset values.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import Field
from pydantic_settings import BaseSettings

from src.core.errors import ConfigError
from src.models.enums import ChannelModel, DatasetSplit, LargeScaleMode, Method, ReportFormat
from src.models.experiment import ExperimentSpec
from src.models.network import HGNetConfig, LayerSpec, TrainConfig
from src.models.scenario import PeriodSpec, ScenarioConfig


class LabSettings(BaseSettings):
    """Process-wide defaults read from the environment."""

    seed: int | None = Field(default=None, ge=0, description="Overrides every preset seed")
    threads: int = Field(default=1, ge=1, description="Worker threads for cells and generation")
    log_level: str = Field(default="INFO")
    data_dir: Path = Field(default=Path("data"))
    output_dir: Path = Field(default=Path("results"))
    report_format: ReportFormat = Field(default=ReportFormat.CSV)

    model_config = {
        "env_prefix": "HGNET_",
        "case_sensitive": False,
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore",
    }


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------
# desk:      Q=I=4, M=N=2, five 3x3 layers with 8 hidden planes, 512 training
#            and 128 test samples per channel family. Unit large-scale fading
#            keeps sigma^2 = P_max = 1 at a usable SNR.
# full_scale: Q=I=16, M=4, N=2, c_l = 2M everywhere, 6400/640 samples per
#            family on a 500 m square. Kept for reference; far beyond a desk run.
# oau_shift: trains on multipath and Rayleigh channels, tests on Rician ones
#            and sweeps the number of adaptation iterations.
# ---------------------------------------------------------------------------

_FAMILIES: tuple[ChannelModel, ...] = (
    ChannelModel.MULTIPATH,
    ChannelModel.RAYLEIGH,
    ChannelModel.RICIAN,
)


def _periods(
    size: tuple[int, int],
    train: tuple[ChannelModel, ...],
    test: tuple[ChannelModel, ...],
    train_count: int,
    test_count: int,
) -> list[PeriodSpec]:
    q, i = size
    periods = [
        PeriodSpec(num_aps=q, num_users=i, channel_model=cm, sample_count=train_count)
        for cm in train
    ]
    periods += [
        PeriodSpec(
            num_aps=q,
            num_users=i,
            channel_model=cm,
            sample_count=test_count,
            split=DatasetSplit.TEST,
        )
        for cm in test
    ]
    return periods


def _layers(count: int, hidden: int, antennas_per_ap: int) -> list[LayerSpec]:
    return [LayerSpec(channels=hidden) for _ in range(count - 1)] + [
        LayerSpec(channels=2 * antennas_per_ap)
    ]


def _desk() -> ExperimentSpec:
    scenario = ScenarioConfig(
        periods=_periods((4, 4), _FAMILIES, _FAMILIES, 512, 128),
        large_scale=LargeScaleMode.UNIT,
    )
    return ExperimentSpec(
        name="desk",
        scenario=scenario,
        net=HGNetConfig(layers=_layers(5, 8, 2), train=TrainConfig(batch_size=64, epochs=30)),
        eval_sizes=[(4, 4), (6, 6), (8, 8)],
    )


def _full_scale() -> ExperimentSpec:
    scenario = ScenarioConfig(
        periods=_periods((16, 16), _FAMILIES, _FAMILIES, 6400, 640),
        antennas_per_ap=4,
        antennas_per_user=2,
        area_side=500.0,
        large_scale=LargeScaleMode.UNIT,
    )
    return ExperimentSpec(
        name="full_scale",
        scenario=scenario,
        net=HGNetConfig(
            layers=_layers(5, 8, 4),
            antennas_per_ap=4,
            antennas_per_user=2,
            train=TrainConfig(batch_size=64, epochs=30),
        ),
        eval_sizes=[(16, 16), (24, 24), (32, 32)],
        h_sweep=[0, 5, 10, 15, 20],
    )


def _oau_shift() -> ExperimentSpec:
    train = (ChannelModel.MULTIPATH, ChannelModel.RAYLEIGH)
    scenario = ScenarioConfig(
        periods=_periods((4, 4), train, (ChannelModel.RICIAN,), 512, 128),
        large_scale=LargeScaleMode.UNIT,
    )
    return ExperimentSpec(
        name="oau_shift",
        scenario=scenario,
        net=HGNetConfig(
            layers=_layers(5, 8, 2), num_classes=2, train=TrainConfig(batch_size=64, epochs=30)
        ),
        methods=[Method.HGNET],
        eval_sizes=[(4, 4)],
        eval_channels=[ChannelModel.RICIAN],
        h_sweep=[0, 5, 10, 15, 20],
    )


PRESETS = {
    "desk": _desk,
    "full_scale": _full_scale,
    "oau_shift": _oau_shift,
}


def preset(name: str) -> ExperimentSpec:
    """Build a fresh copy of a named preset.

    Raises:
        ConfigError: If no preset has that name.
    """
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def load_experiment(ref: str | Path) -> ExperimentSpec:
    """Load an experiment from a preset name or a JSON file.

    Raises:
        ConfigError: If the file is missing or unreadable.
        pydantic.ValidationError: If the document does not validate.
    """
    if isinstance(ref, str) and ref in PRESETS:
        return preset(ref)
    path = Path(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read experiment file {path}: {exc}") from exc
    return ExperimentSpec.model_validate_json(text)


def with_overrides(spec: ExperimentSpec, settings: LabSettings, **fields: Any) -> ExperimentSpec:
    """Apply the settings seed and explicit top-level field overrides."""
    update: dict[str, Any] = {k: v for k, v in fields.items() if v is not None}
    if settings.seed is not None:
        update["scenario"] = spec.scenario.model_copy(update={"seed": settings.seed})
        update["net"] = spec.net.model_copy(
            update={"train": spec.net.train.model_copy(update={"seed": settings.seed})}
        )
    if not update:
        return spec
    return ExperimentSpec.model_validate({**spec.model_dump(), **_dumped(update)})


def _dumped(update: dict[str, Any]) -> dict[str, Any]:
    return {k: v.model_dump() if hasattr(v, "model_dump") else v for k, v in update.items()}
