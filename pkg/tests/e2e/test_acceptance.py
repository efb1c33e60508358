"""Desk-scale acceptance runs: training, adaptation trend and relative latency.

These train real networks on the presets and take minutes. Select them with
``-m simulation``.
"""

import numpy as np
import pytest

from src.channel_sim.generators import generate_samples
from src.harness.bench import bench_timing
from src.harness.config import preset
from src.harness.experiment import TrainedNet, eval_period, run_experiment, training_samples
from src.hgnet.params import init_params
from src.hgnet.train import train
from src.metrics.rates import sum_rate
from src.models.adaptation import OAUConfig
from src.models.enums import ChannelModel, Method
from src.models.experiment import ExperimentSpec
from src.models.scenario import CSISample
from src.oau.adapter import adapt, param_delta_report


def _trained(spec: ExperimentSpec) -> TrainedNet:
    params = init_params(spec.net, seed=spec.net.train.seed)
    history = train(params, spec.net, training_samples(spec))
    return TrainedNet(params=params, cfg=spec.net, history=history)


@pytest.fixture(scope="module")
def desk() -> tuple[ExperimentSpec, TrainedNet]:
    spec = preset("desk")
    return spec, _trained(spec)


@pytest.fixture(scope="module")
def shift() -> tuple[ExperimentSpec, TrainedNet]:
    spec = preset("oau_shift")
    return spec, _trained(spec)


@pytest.mark.slow
@pytest.mark.simulation
class TestDeskTraining:
    """Test suite for desk-scale training quality."""

    def test_loss_decreases(self, desk: tuple[ExperimentSpec, TrainedNet]) -> None:
        """The last epoch ends below the first."""
        _, net = desk
        assert net.history is not None
        assert net.history.epoch_loss[-1] < net.history.epoch_loss[0]

    def test_in_distribution_rate_against_wmmse(
        self, desk: tuple[ExperimentSpec, TrainedNet]
    ) -> None:
        """HGNet reaches at least 60% of the WMMSE mean sum rate at the training size."""
        spec, net = desk
        spec = spec.model_copy(
            update={"methods": [Method.WMMSE, Method.HGNET], "eval_sizes": [(4, 4)]}
        )
        rows = run_experiment(spec, nets={Method.HGNET: net}).rows
        mean = {
            m: np.mean([r.mean_sum_rate for r in rows if r.method == m])
            for m in (Method.WMMSE, Method.HGNET)
        }
        assert mean[Method.HGNET] >= 0.6 * mean[Method.WMMSE]


@pytest.mark.slow
@pytest.mark.simulation
class TestAdaptationTrend:
    """Test suite for online adaptation under an unseen channel family."""

    def test_rate_rises_with_iterations(self, shift: tuple[ExperimentSpec, TrainedNet]) -> None:
        """Mean Rician sum rate never drops from H=0 to H=15 and ends higher."""
        spec, net = shift
        period = eval_period(spec, ChannelModel.RICIAN, (4, 4))
        samples = generate_samples(period, spec.scenario, 2000, count=200)
        means = []
        for h in (0, 5, 10, 15):
            oau = spec.oau.model_copy(update={"iterations": h})
            rates = [
                sum_rate(s.H, adapt(net.params, net.cfg, oau, s).beams, s.noise_power)
                for s in samples
            ]
            means.append(float(np.mean(rates)))
        assert all(b >= a for a, b in zip(means, means[1:], strict=False))
        assert means[-1] > means[0]

    def test_only_normalization_affine_moves(
        self, shift: tuple[ExperimentSpec, TrainedNet]
    ) -> None:
        """Under 5% of the values change and every other group is bit-identical."""
        spec, net = shift
        period = eval_period(spec, ChannelModel.RICIAN, (4, 4))
        sample = generate_samples(period, spec.scenario, 2000, count=1)[0]
        result = adapt(net.params, net.cfg, OAUConfig(iterations=15), sample)
        delta = param_delta_report(net.params, result.params)
        assert delta.touched_fraction < 0.05
        assert all(g.max_abs_delta == 0.0 for g in delta.groups if not g.affine)


@pytest.mark.slow
@pytest.mark.simulation
class TestRelativeLatency:
    """Test suite for latency orderings on the same machine."""

    @pytest.fixture
    def instances(self, desk: tuple[ExperimentSpec, TrainedNet]) -> list[CSISample]:
        spec, _ = desk
        period = eval_period(spec, ChannelModel.RAYLEIGH, (8, 8))
        return generate_samples(period, spec.scenario, 3000, count=20)

    def test_inference_beats_wmmse(
        self, desk: tuple[ExperimentSpec, TrainedNet], instances: list[CSISample]
    ) -> None:
        """Network inference is at least five times faster than WMMSE at Q=I=8."""
        spec, net = desk
        wmmse = bench_timing(Method.WMMSE, instances, spec=spec)
        hgnet = bench_timing(Method.HGNET, instances, spec=spec, net=net)
        assert 5.0 * hgnet.median_s <= wmmse.median_s

    def test_adaptation_cost_grows_with_iterations(
        self, desk: tuple[ExperimentSpec, TrainedNet], instances: list[CSISample]
    ) -> None:
        """More update iterations never cost less."""
        spec, net = desk
        medians = [
            bench_timing(
                Method.HGNET, instances[:5], spec=spec, net=net, oau_iterations=h
            ).median_s
            for h in (1, 5, 20)
        ]
        assert medians == sorted(medians)
