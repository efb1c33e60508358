"""Unit tests for HGNet training."""

import numpy as np
import pytest

from fixtures.model_fixtures import make_net_config, make_scenario, split_samples
from src.core.errors import ArchitectureError, ConfigError, TrainingError
from src.diffnum import GradTape
from src.hgnet.params import init_params
from src.hgnet.train import batch_loss, calibrate_running_stats, make_batches, train
from src.models.enums import ChannelModel, DatasetSplit
from src.models.network import HGNetConfig, LayerSpec, TrainConfig
from src.models.scenario import CSISample

REL_FLOOR = 1e-4


@pytest.mark.unit
class TestEndToEndGradient:
    """Tape gradients of the whole objective against central differences."""

    def test_ten_random_parameters(self, tiny_train_samples: list[CSISample]) -> None:
        """Ten probed values agree to 1e-3 relative."""
        cfg = make_net_config(hidden=(3,), adv_weight=0.0, discard_per_layer=0)
        params = init_params(cfg, seed=5)
        batch = tiny_train_samples[:4]

        def objective() -> float:
            rng = np.random.default_rng(0)
            return batch_loss(params, cfg, batch, rng, update_stats=False).total

        tape = GradTape()
        loss = batch_loss(params, cfg, batch, np.random.default_rng(0), tape, update_stats=False)
        tape.backward(loss.seeds)
        groups = params.groups()
        for group in groups:
            group.collect(tape)

        rng = np.random.default_rng(1)
        step = 1e-5
        for _ in range(10):
            group = groups[int(rng.integers(len(groups)))]
            idx = tuple(int(rng.integers(n)) for n in group.values.shape)
            original = group.values.data[idx]
            group.values.data[idx] = original + step
            f_plus = objective()
            group.values.data[idx] = original - step
            f_minus = objective()
            group.values.data[idx] = original
            numeric = (f_plus - f_minus) / (2.0 * step)
            analytic = group.grad.data[idx]
            denom = max(abs(numeric), abs(analytic), REL_FLOOR)
            assert abs(analytic - numeric) / denom < 1e-3, group.name

    def test_discriminator_losses_are_seeded(
        self, tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
    ) -> None:
        """Each head's loss is seeded with adv_weight / (L - 1)."""
        params = init_params(tiny_cfg)
        loss = batch_loss(params, tiny_cfg, tiny_train_samples[::3], np.random.default_rng(2))
        disc_seeds = [s for t, s in loss.seeds.items() if t is not loss.trace.output]
        assert disc_seeds == [tiny_cfg.adv_weight / 2] * 2
        assert loss.total == pytest.approx(loss.rate + tiny_cfg.adv_weight * loss.disc)

    def test_disabled_module_adds_nothing(self, tiny_train_samples: list[CSISample]) -> None:
        """Without generalization the objective is the rate loss alone."""
        cfg = make_net_config().without_generalization()
        loss = batch_loss(init_params(cfg), cfg, tiny_train_samples[:4], np.random.default_rng(3))
        assert list(loss.seeds) == [loss.trace.output]
        assert loss.total == loss.rate
        assert loss.disc == 0.0


@pytest.mark.unit
class TestTrain:
    """Test suite for train."""

    def test_rate_loss_decreases(self, tiny_train_samples: list[CSISample]) -> None:
        """A few epochs on the tiny net lower the mean rate loss."""
        cfg = make_net_config(
            train=TrainConfig(batch_size=8, epochs=8, learning_rate=1e-2, seed=4)
        ).without_generalization()
        result = train(init_params(cfg, seed=4), cfg, tiny_train_samples)
        assert len(result.epoch_rate_loss) == 8
        assert min(result.epoch_rate_loss[-3:]) < result.epoch_rate_loss[0]

    def test_histories_per_epoch(
        self, tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
    ) -> None:
        """One entry per epoch; the discriminator term is positive."""
        result = train(init_params(tiny_cfg), tiny_cfg, tiny_train_samples)
        assert len(result.epoch_loss) == tiny_cfg.train.epochs
        assert all(np.isfinite(result.epoch_loss))
        assert all(d > 0.0 for d in result.epoch_disc_loss)
        assert all(state.populated for state in result.params.bn_states())

    def test_deterministic(
        self, tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
    ) -> None:
        """Same seed, same parameters."""
        a = train(init_params(tiny_cfg, seed=1), tiny_cfg, tiny_train_samples).params
        b = train(init_params(tiny_cfg, seed=1), tiny_cfg, tiny_train_samples).params
        for ga, gb in zip(a.groups(), b.groups(), strict=True):
            assert np.array_equal(ga.values.data, gb.values.data)

    def test_invalid_architecture_rejected(self, tiny_train_samples: list[CSISample]) -> None:
        """A last layer without 2M planes never trains."""
        cfg = make_net_config()
        cfg.layers[-1] = LayerSpec(channels=5)
        with pytest.raises(ArchitectureError):
            train(init_params(cfg), cfg, tiny_train_samples)

    def test_class_count_mismatch(self, tiny_cfg: HGNetConfig) -> None:
        """Two families against three declared classes."""
        scenario = make_scenario(families=(ChannelModel.MULTIPATH, ChannelModel.RAYLEIGH))
        samples = split_samples(scenario, DatasetSplit.TRAIN)
        with pytest.raises(ConfigError):
            train(init_params(tiny_cfg), tiny_cfg, samples)

    def test_no_samples(self, tiny_cfg: HGNetConfig) -> None:
        """Empty data is a configuration error."""
        with pytest.raises(ConfigError):
            train(init_params(tiny_cfg), tiny_cfg, [])

    def test_no_usable_batch(self, tiny_train_samples: list[CSISample]) -> None:
        """A single sample cannot form a batch."""
        cfg = make_net_config().without_generalization()
        with pytest.raises(ConfigError):
            train(init_params(cfg), cfg, tiny_train_samples[:1])

    def test_non_finite_loss_reports_epoch(
        self, mocker, tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
    ) -> None:
        """A NaN objective aborts with the epoch index."""
        mocker.patch(
            "src.hgnet.train.batch_rate_loss", return_value=(float("nan"), np.zeros(1))
        )
        with pytest.raises(TrainingError) as excinfo:
            train(init_params(tiny_cfg), tiny_cfg, tiny_train_samples)
        assert excinfo.value.iteration == 0


@pytest.mark.unit
class TestBatching:
    """Test suite for make_batches and calibrate_running_stats."""

    @pytest.fixture
    def mixed_samples(self, tiny_train_samples: list[CSISample]) -> list[CSISample]:
        larger = split_samples(make_scenario(size=(4, 4), train_count=3), DatasetSplit.TRAIN)
        return tiny_train_samples + larger

    def test_ordered_batches(self, mixed_samples: list[CSISample]) -> None:
        """Without rng order is kept and batches never mix sizes."""
        batches = make_batches(mixed_samples, 8)
        assert [id(s) for s in batches[0]] == [id(s) for s in mixed_samples[:8]]
        assert [len(b) for b in batches] == [8, 8, 8, 8]
        for batch in batches:
            assert len({(s.num_aps, s.num_users) for s in batch}) == 1

    def test_singleton_batches_dropped(self, mixed_samples: list[CSISample]) -> None:
        """Nine 4x4 samples with batch size 8 leave one sample out."""
        batches = make_batches(mixed_samples, 8)
        assert sum(len(b) for b in batches) == len(mixed_samples) - 1

    def test_shuffled_batches_cover_the_same_samples(
        self, mixed_samples: list[CSISample]
    ) -> None:
        """Shuffling permutes but keeps batches homogeneous."""
        batches = make_batches(mixed_samples, 5, np.random.default_rng(0))
        seen = [id(s) for b in batches for s in b]
        assert len(seen) == len(set(seen))
        for batch in batches:
            assert len({(s.num_aps, s.num_users) for s in batch}) == 1

    def test_calibration_is_repeatable(
        self, tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
    ) -> None:
        """Recalibrating gives the same statistics over the fixed batch order."""
        params = init_params(tiny_cfg)
        calibrate_running_stats(params, tiny_cfg, tiny_train_samples)
        first = [s.copy() for s in params.bn_states()]
        calibrate_running_stats(params, tiny_cfg, tiny_train_samples)
        for old, new in zip(first, params.bn_states(), strict=True):
            assert np.array_equal(old.running_mean, new.running_mean)
            assert np.array_equal(old.running_var, new.running_var)
            assert new.batches_seen == 3
