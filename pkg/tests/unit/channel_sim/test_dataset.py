"""Unit tests for dataset persistence."""

from pathlib import Path

import numpy as np
import pytest

from fixtures.model_fixtures import make_scenario
from src.channel_sim.dataset import gen_dataset, load_dataset, load_manifest
from src.channel_sim.generators import generate_samples
from src.core.errors import PersistenceError
from src.harness.config import preset
from src.models.enums import DatasetSplit


@pytest.mark.unit
class TestDataset:
    """Test suite for gen_dataset and its loaders."""

    def test_regeneration_is_byte_identical(self, tmp_path: Path) -> None:
        """Same seed twice writes the same bytes."""
        scenario = make_scenario(train_count=3, test_count=2)
        gen_dataset(scenario, tmp_path / "a")
        gen_dataset(scenario, tmp_path / "b")
        for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_manifest_records_shapes_and_labels(self, tmp_path: Path) -> None:
        """Every period entry echoes its counts, shape, label and split."""
        scenario = make_scenario(size=(3, 2), train_count=3, test_count=2, seed=4)
        manifest = gen_dataset(scenario, tmp_path)
        assert len(manifest.periods) == 6
        first = manifest.periods[0]
        assert (first.rows, first.cols) == (4, 6)
        assert first.sample_count == 3
        assert first.seed == 4
        assert [p.label for p in manifest.periods] == [0, 1, 2, 0, 1, 2]
        assert manifest.periods[-1].split == DatasetSplit.TEST
        assert load_manifest(tmp_path) == manifest

    def test_period_file_size(self, tmp_path: Path) -> None:
        """Each file holds samples x rows x cols complex128 values."""
        scenario = make_scenario(size=(3, 2), train_count=3)
        gen_dataset(scenario, tmp_path)
        assert (tmp_path / "period_000.bin").stat().st_size == 3 * 4 * 6 * 16

    def test_load_reproduces_generated_channels(self, tmp_path: Path) -> None:
        """Loaded samples equal the written ones bit for bit."""
        scenario = make_scenario(train_count=3, test_count=2)
        gen_dataset(scenario, tmp_path)
        loaded = load_dataset(tmp_path, split=DatasetSplit.TRAIN)
        assert sorted(loaded) == [0, 1, 2]
        fresh = generate_samples(scenario.periods[1], scenario, 1)
        assert all(np.array_equal(a.H, b.H) for a, b in zip(loaded[1], fresh, strict=True))
        assert loaded[1][0].channel_model_label == 1

    def test_truncated_period_rejected(self, tmp_path: Path) -> None:
        """A short period file is a persistence error."""
        gen_dataset(make_scenario(train_count=2, test_count=1), tmp_path)
        path = tmp_path / "period_000.bin"
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(PersistenceError):
            load_dataset(tmp_path)

    def test_missing_directory_rejected(self, tmp_path: Path) -> None:
        """No manifest is a persistence error."""
        with pytest.raises(PersistenceError):
            load_manifest(tmp_path / "missing")

    def test_unwritable_target_rejected(self, tmp_path: Path) -> None:
        """Writing under a regular file fails with a persistence error."""
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(PersistenceError):
            gen_dataset(make_scenario(train_count=1, test_count=1), blocker / "data")

    @pytest.mark.parametrize(("name", "train", "test"), [("desk", 512, 128), ("full_scale", 6400, 640)])
    def test_preset_counts(self, name: str, train: int, test: int) -> None:
        """Three families with the preset's train and test counts."""
        scenario = preset(name).scenario
        assert [p.sample_count for _, p in scenario.periods_for(DatasetSplit.TRAIN)] == [train] * 3
        assert [p.sample_count for _, p in scenario.periods_for(DatasetSplit.TEST)] == [test] * 3
