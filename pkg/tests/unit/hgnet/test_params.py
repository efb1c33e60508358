"""Unit tests for HGNet parameter groups."""

import numpy as np
import pytest

from fixtures.model_fixtures import make_net_config
from src.hgnet.params import count_parameters, init_params
from src.models.network import HGNetConfig


@pytest.mark.unit
class TestParams:
    """Test suite for init_params and HGNetParams."""

    def test_desk_census(self, desk_cfg: HGNetConfig) -> None:
        """Five 3x3 layers of eight planes: 2520 values, 72 of them affine."""
        census = count_parameters(init_params(desk_cfg))
        assert census.total == 2520
        assert census.conv == 2340
        assert census.affine == 72
        assert census.discriminator == 108
        assert census.affine_fraction < 0.05

    def test_group_layout(self, tiny_cfg: HGNetConfig) -> None:
        """Heads on layers 1..L-1 only; BN starts at unit scale."""
        params = init_params(tiny_cfg)
        assert [layer.has_discriminator for layer in params.layers] == [True, True, False]
        first = params.layers[0]
        assert first.kernels.values.shape == (3, 3, 4, 4)
        assert first.disc_weights is not None
        assert first.disc_weights.values.shape == (3, 4)
        assert np.all(first.gamma.values.data == 1.0)
        assert np.all(first.beta.values.data == 0.0)
        assert len(params.affine_groups()) == 6

    def test_seeded_initialization(self) -> None:
        """Same seed, same kernels; another seed differs."""
        cfg = make_net_config()
        a, b, c = init_params(cfg, seed=1), init_params(cfg, seed=1), init_params(cfg, seed=2)
        assert np.array_equal(a.layers[0].kernels.values.data, b.layers[0].kernels.values.data)
        assert not np.array_equal(a.layers[0].kernels.values.data, c.layers[0].kernels.values.data)

    def test_copy_is_independent(self, tiny_cfg: HGNetConfig) -> None:
        """Writes to the copy never reach the original."""
        params = init_params(tiny_cfg)
        clone = params.copy()
        clone.layers[0].gamma.values.data[...] = 7.0
        clone.layers[1].bn.running_mean[...] = 3.0
        assert np.all(params.layers[0].gamma.values.data == 1.0)
        assert np.all(params.layers[1].bn.running_mean == 0.0)
        assert clone.class_ids == params.class_ids

    def test_affine_only_freezes_the_rest(self, tiny_cfg: HGNetConfig) -> None:
        """Only gamma and beta stay trainable."""
        params = init_params(tiny_cfg)
        params.set_trainable(affine_only=True)
        assert all(g.trainable == g.affine for g in params.groups())
        params.set_trainable(affine_only=False)
        assert all(g.trainable for g in params.groups())

    def test_class_index(self, tiny_cfg: HGNetConfig) -> None:
        """Labels map through class_ids; unknown labels raise."""
        params = init_params(tiny_cfg)
        params.class_ids = [0, 2, 5]
        assert params.class_index(np.array([5, 0, 2])).tolist() == [2, 0, 1]
        with pytest.raises(ValueError):
            params.class_index(np.array([1]))
