"""Shared configuration, channel and network fixtures."""

import numpy as np
import pytest

from src.channel_sim.generators import generate_samples
from src.hgnet.params import HGNetParams, init_params
from src.hgnet.train import train
from src.models.enums import ChannelModel, DatasetSplit, LargeScaleMode, Method
from src.models.experiment import ExperimentSpec
from src.models.network import HGNetConfig, LayerSpec, TrainConfig
from src.models.scenario import CSISample, PeriodSpec, ScenarioConfig

FAMILIES = (ChannelModel.MULTIPATH, ChannelModel.RAYLEIGH, ChannelModel.RICIAN)


def make_net_config(
    hidden: tuple[int, ...] = (4, 4),
    antennas_per_ap: int = 2,
    antennas_per_user: int = 2,
    **fields: object,
) -> HGNetConfig:
    """Unit-stride 3x3 network whose last layer emits 2M planes."""
    layers = [LayerSpec(channels=c) for c in hidden] + [LayerSpec(channels=2 * antennas_per_ap)]
    return HGNetConfig(
        layers=layers,
        antennas_per_ap=antennas_per_ap,
        antennas_per_user=antennas_per_user,
        **fields,
    )


def make_scenario(
    size: tuple[int, int] = (3, 3),
    families: tuple[ChannelModel, ...] = FAMILIES,
    train_count: int = 8,
    test_count: int = 4,
    seed: int = 0,
) -> ScenarioConfig:
    """Small unit-fading scenario with one train and one test period per family."""
    q, i = size
    periods = [
        PeriodSpec(num_aps=q, num_users=i, channel_model=cm, sample_count=train_count)
        for cm in families
    ] + [
        PeriodSpec(
            num_aps=q,
            num_users=i,
            channel_model=cm,
            sample_count=test_count,
            split=DatasetSplit.TEST,
        )
        for cm in families
    ]
    return ScenarioConfig(periods=periods, large_scale=LargeScaleMode.UNIT, seed=seed)


def make_spec(
    methods: tuple[Method, ...] = (Method.WMMSE, Method.MRT),
    eval_sizes: tuple[tuple[int, int], ...] = ((3, 3),),
    eval_samples: int = 2,
    **fields: object,
) -> ExperimentSpec:
    """Tiny experiment over the three families with one-epoch training."""
    net = make_net_config(
        discard_per_layer=1,
        train=TrainConfig(batch_size=8, epochs=1, learning_rate=1e-2, seed=3),
    )
    return ExperimentSpec(
        name="tiny",
        scenario=make_scenario(),
        net=net,
        methods=list(methods),
        eval_sizes=list(eval_sizes),
        eval_samples=eval_samples,
        **fields,
    )


def split_samples(scenario: ScenarioConfig, split: DatasetSplit) -> list[CSISample]:
    """All samples of one split, generated in memory."""
    out: list[CSISample] = []
    for index, period in scenario.periods_for(split):
        out.extend(generate_samples(period, scenario, index))
    return out


def random_beams(rng: np.random.Generator, shape: tuple[int, int, int]) -> np.ndarray:
    """Complex Gaussian beam tensor."""
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def tiny_cfg() -> HGNetConfig:
    """Three-layer net with four hidden planes, M=N=2, three classes."""
    return make_net_config(
        discard_per_layer=1,
        train=TrainConfig(batch_size=8, epochs=2, learning_rate=1e-2, seed=3),
    )


@pytest.fixture
def tiny_scenario() -> ScenarioConfig:
    """Q=I=3 scenario over the three channel families."""
    return make_scenario()


@pytest.fixture
def tiny_train_samples(tiny_scenario: ScenarioConfig) -> list[CSISample]:
    """Eight training samples per family."""
    return split_samples(tiny_scenario, DatasetSplit.TRAIN)


@pytest.fixture
def tiny_test_samples(tiny_scenario: ScenarioConfig) -> list[CSISample]:
    """Four test samples per family."""
    return split_samples(tiny_scenario, DatasetSplit.TEST)


@pytest.fixture
def trained_tiny(
    tiny_cfg: HGNetConfig, tiny_train_samples: list[CSISample]
) -> HGNetParams:
    """Tiny net after two epochs, with calibrated running statistics."""
    params = init_params(tiny_cfg, seed=tiny_cfg.train.seed)
    train(params, tiny_cfg, tiny_train_samples)
    return params


@pytest.fixture
def desk_cfg() -> HGNetConfig:
    """Desk architecture: five 3x3 layers, eight hidden planes, M=N=2."""
    return make_net_config(hidden=(8, 8, 8, 8))
