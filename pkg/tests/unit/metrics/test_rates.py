"""Unit tests for rate evaluation and per-AP power handling."""

import math

import numpy as np
import pytest

from fixtures.model_fixtures import random_beams
from src.core.errors import NumericError, ShapeError
from src.metrics.power import ap_powers, is_feasible, per_ap_power, project_power
from src.metrics.rates import (
    beams_to_vectors,
    sum_rate,
    user_blocks,
    user_rate,
    user_rates,
    vectors_to_beams,
)
from src.models.enums import ProjectionMode


def _dense_rate(h: np.ndarray, v: np.ndarray, i: int, noise_power: float, n: int) -> float:
    """Rate of user i straight from the log-det formula."""
    vec = beams_to_vectors(v)
    h_i = h[i * n : (i + 1) * n]
    interference = noise_power * np.eye(n, dtype=complex)
    for j in range(vec.shape[0]):
        if j != i:
            s = h_i @ vec[j][:, None]
            interference = interference + s @ s.conj().T
    s_i = h_i @ vec[i][:, None]
    m = np.eye(n) + s_i @ s_i.conj().T @ np.linalg.inv(interference)
    return float(np.log2(np.linalg.det(m).real))


@pytest.mark.unit
class TestRates:
    """Test suite for user_rate and sum_rate."""

    def test_siso_unit_case(self) -> None:
        """h = v = sigma^2 = 1 gives log2(2) = 1."""
        h = np.array([[1.0 + 0j]])
        v = np.ones((1, 1, 1), dtype=complex)
        assert user_rate(h, v, 0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_siso_closed_form(self) -> None:
        """1000 scalar cases equal log2(1 + |hv|^2 / s2) to 1e-10."""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            h = complex(*rng.normal(size=2))
            v = complex(*rng.normal(size=2))
            s2 = float(rng.uniform(0.1, 10.0))
            expected = math.log2(1.0 + abs(h * v) ** 2 / s2)
            got = sum_rate(np.array([[h]]), np.array([[[v]]]), s2)
            assert got == pytest.approx(expected, abs=1e-10)

    def test_zero_beams_give_zero_rate(self) -> None:
        """All-zero V carries no rate for any user."""
        rng = np.random.default_rng(1)
        h = random_beams(rng, (4, 6, 1)).reshape(4, 6)
        rates = user_rates(h, np.zeros((3, 2, 2), dtype=complex), 1.0)
        assert np.all(rates == 0.0)
        assert sum_rate(h, np.zeros((3, 2, 2), dtype=complex), 1.0) == 0.0

    def test_matches_dense_oracle(self) -> None:
        """Two users with N=2 agree with direct complex arithmetic to 1e-10."""
        rng = np.random.default_rng(2)
        h = random_beams(rng, (4, 6, 1)).reshape(4, 6)
        v = random_beams(rng, (3, 2, 2))
        rates = user_rates(h, v, 0.7)
        for i in range(2):
            assert rates[i] == pytest.approx(_dense_rate(h, v, i, 0.7, 2), abs=1e-10)

    def test_single_user_sum_equals_user_rate(self) -> None:
        """I = 1 makes the sum the single rate."""
        rng = np.random.default_rng(3)
        h = random_beams(rng, (2, 4, 1)).reshape(2, 4)
        v = random_beams(rng, (2, 1, 2))
        assert sum_rate(h, v, 1.0) == pytest.approx(user_rate(h, v, 0, 1.0), abs=1e-12)

    def test_invariant_under_receive_rotation(self) -> None:
        """Replacing H_i by U H_i with U unitary changes the rate by < 1e-9."""
        rng = np.random.default_rng(4)
        h = random_beams(rng, (4, 6, 1)).reshape(4, 6)
        v = random_beams(rng, (3, 2, 2))
        u, _ = np.linalg.qr(random_beams(rng, (2, 2, 1)).reshape(2, 2))
        rotated = h.copy()
        rotated[0:2] = u @ h[0:2]
        assert abs(user_rate(h[0:2], v, 0, 1.0) - user_rate(rotated[0:2], v, 0, 1.0)) < 1e-9
        assert abs(sum_rate(h, v, 1.0) - sum_rate(rotated, v, 1.0)) < 1e-9

    def test_non_finite_input_raises(self) -> None:
        """NaN in H is a numeric error."""
        h = np.array([[np.nan + 0j]])
        with pytest.raises(NumericError):
            sum_rate(h, np.ones((1, 1, 1), dtype=complex), 1.0)

    def test_shape_mismatch_raises(self) -> None:
        """Columns must equal Q*M."""
        with pytest.raises(ShapeError):
            sum_rate(np.ones((2, 3), dtype=complex), np.ones((2, 1, 2), dtype=complex), 1.0)

    def test_rows_must_split_over_users(self) -> None:
        """Odd row count cannot be split over two users."""
        with pytest.raises(ShapeError):
            user_blocks(np.ones((3, 2)), 2)

    def test_vector_layout(self) -> None:
        """Entry q*M + m of user i's vector is V[q, i, m]."""
        v = np.arange(12).reshape(3, 2, 2).astype(complex)
        vec = beams_to_vectors(v)
        assert vec[1, 2 * 2 + 1] == v[2, 1, 1]
        assert np.array_equal(vectors_to_beams(vec, 3, 2), v)


@pytest.mark.unit
class TestPower:
    """Test suite for per-AP power and the projection."""

    def test_zero_beams_have_zero_power(self) -> None:
        """Zero V draws no power."""
        assert per_ap_power(np.zeros((2, 2, 2), dtype=complex), 1) == 0.0

    def test_unit_norm_beam(self) -> None:
        """v = (1, 1)/sqrt(2) on one AP draws 1 W."""
        v = np.full((1, 1, 2), 1.0 / math.sqrt(2.0), dtype=complex)
        assert per_ap_power(v, 0) == pytest.approx(1.0, abs=1e-15)

    def test_feasible_beams_unchanged(self) -> None:
        """Power P_max/2 passes through."""
        v = np.full((1, 1, 2), 0.5, dtype=complex)
        assert np.array_equal(project_power(v, 1.0), v)

    def test_exact_mode_scales_by_root(self) -> None:
        """Power 4 P_max is scaled by 1/2 onto P_max."""
        v = np.full((1, 1, 2), math.sqrt(2.0), dtype=complex)
        out = project_power(v, 1.0, ProjectionMode.EXACT)
        assert np.allclose(out, v / 2.0)
        assert ap_powers(out)[0] == pytest.approx(1.0)

    def test_literal_mode_overshrinks(self) -> None:
        """Power 4 P_max is scaled by 1/4 down to P_max/4."""
        v = np.full((1, 1, 2), math.sqrt(2.0), dtype=complex)
        out = project_power(v, 1.0, ProjectionMode.LINEAR)
        assert np.allclose(out, v / 4.0)
        assert ap_powers(out)[0] == pytest.approx(0.25)

    @pytest.mark.parametrize("mode", list(ProjectionMode))
    def test_projection_always_feasible(self, mode: ProjectionMode) -> None:
        """1e4 random tensors satisfy every AP budget after projection."""
        rng = np.random.default_rng(5)
        v = random_beams(rng, (10_000, 3, 2)) * rng.uniform(0.0, 3.0, size=(10_000, 1, 1))
        out = project_power(v, 0.8, mode)
        assert np.all(ap_powers(out) <= 0.8 * (1.0 + 1e-12))
        assert is_feasible(out, 0.8, rtol=1e-12)

    def test_budget_must_be_positive(self) -> None:
        """P_max = 0 is an argument error."""
        with pytest.raises(ValueError):
            project_power(np.ones((1, 1, 1), dtype=complex), 0.0)

    def test_rank_checked(self) -> None:
        """A matrix is not a beam tensor."""
        with pytest.raises(ShapeError):
            ap_powers(np.ones((2, 2)))
