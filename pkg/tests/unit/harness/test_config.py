"""Unit tests for lab settings, presets and experiment loading."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from fixtures.model_fixtures import make_spec
from src.core.errors import ConfigError
from src.harness.config import PRESETS, LabSettings, load_experiment, preset, with_overrides
from src.models.enums import ChannelModel, DatasetSplit, Method, ReportFormat
from src.models.experiment import ExperimentSpec


@pytest.mark.unit
class TestPresets:
    """Test suite for the named presets."""

    @pytest.mark.parametrize(
        ("name", "train_count", "test_count"), [("desk", 512, 128), ("full_scale", 6400, 640)]
    )
    def test_sample_counts(self, name: str, train_count: int, test_count: int) -> None:
        """Per-family sample counts of both splits."""
        spec = preset(name)
        train = spec.scenario.periods_for(DatasetSplit.TRAIN)
        test = spec.scenario.periods_for(DatasetSplit.TEST)
        assert {p.sample_count for _, p in train} == {train_count}
        assert {p.sample_count for _, p in test} == {test_count}
        assert len(train) == len(test) == 3

    def test_desk_network(self) -> None:
        """Five layers, eight hidden planes, 2M on the last."""
        net = preset("desk").net
        assert [layer.channels for layer in net.layers] == [8, 8, 8, 8, 4]
        assert net.train.batch_size == 64
        assert net.train.learning_rate == 1e-3

    def test_shift_preset_holds_out_rician(self) -> None:
        """Two training families, Rician only at test time, with a sweep."""
        spec = preset("oau_shift")
        train = {p.channel_model for _, p in spec.scenario.periods_for(DatasetSplit.TRAIN)}
        assert ChannelModel.RICIAN not in train
        assert spec.net.num_classes == 2
        assert spec.h_sweep == [0, 5, 10, 15, 20]

    def test_presets_are_fresh(self) -> None:
        """Mutating one preset never leaks into the next call."""
        first = preset("desk")
        first.eval_sizes.append((9, 9))
        assert (9, 9) not in preset("desk").eval_sizes

    def test_unknown_preset(self) -> None:
        """Unknown names list the available ones."""
        with pytest.raises(ConfigError, match="desk"):
            preset("nope")
        assert set(PRESETS) == {"desk", "full_scale", "oau_shift"}


@pytest.mark.unit
class TestLoadExperiment:
    """Test suite for load_experiment and with_overrides."""

    def test_json_round_trip(self, tmp_path: Path) -> None:
        """A dumped spec loads back equal."""
        spec = make_spec()
        path = tmp_path / "exp.json"
        path.write_text(spec.model_dump_json())
        assert load_experiment(path) == spec
        assert load_experiment(str(path)) == spec

    def test_missing_file(self, tmp_path: Path) -> None:
        """Unreadable files are configuration errors."""
        with pytest.raises(ConfigError):
            load_experiment(tmp_path / "absent.json")

    def test_invalid_document(self, tmp_path: Path) -> None:
        """Schema violations surface as validation errors."""
        path = tmp_path / "bad.json"
        path.write_text('{"name": "x"}')
        with pytest.raises(ValidationError):
            load_experiment(path)

    def test_antenna_mismatch_rejected(self) -> None:
        """Network and scenario must agree on M and N."""
        spec = make_spec()
        with pytest.raises(ValidationError):
            ExperimentSpec.model_validate(
                {**spec.model_dump(), "net": spec.net.model_copy(update={"antennas_per_ap": 3})}
            )

    def test_seed_override_reaches_scenario_and_training(self) -> None:
        """One seed drives channels and training."""
        spec = with_overrides(make_spec(), LabSettings(seed=9))
        assert spec.scenario.seed == 9
        assert spec.net.train.seed == 9

    def test_field_overrides(self) -> None:
        """Explicit fields replace preset values; None is ignored."""
        spec = with_overrides(make_spec(), LabSettings(), eval_samples=7, checkpoint=None)
        assert spec.eval_samples == 7
        assert spec.checkpoint is None

    def test_no_override_returns_same_spec(self) -> None:
        """Nothing to apply, nothing copied."""
        spec = make_spec()
        assert with_overrides(spec, LabSettings()) is spec


@pytest.mark.unit
class TestLabSettings:
    """Test suite for environment settings."""

    def test_environment_prefix(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """HGNET_ variables configure the lab."""
        monkeypatch.setenv("HGNET_THREADS", "3")
        monkeypatch.setenv("HGNET_REPORT_FORMAT", "json")
        settings = LabSettings()
        assert settings.threads == 3
        assert settings.report_format == ReportFormat.JSON

    def test_defaults(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """One thread, CSV tables, no seed override."""
        for name in ("HGNET_THREADS", "HGNET_SEED", "HGNET_REPORT_FORMAT"):
            monkeypatch.delenv(name, raising=False)
        settings = LabSettings(_env_file=None)
        assert settings.seed is None
        assert settings.threads == 1
        assert settings.report_format == ReportFormat.CSV

    def test_invalid_thread_count(self) -> None:
        """Zero workers is rejected."""
        with pytest.raises(ValidationError):
            LabSettings(threads=0)

    def test_methods_default(self) -> None:
        """Experiments compare WMMSE, MRT and HGNet unless told otherwise."""
        spec = preset("desk")
        assert spec.methods == [Method.WMMSE, Method.MRT, Method.HGNET]
