"""
WMMSE sum-rate baseline under per-AP power constraints.

Each iteration updates the MMSE receive filters, the MSE weights and then the
beamformers. The beamformer step solves the weighted least-squares system
``(J + D(mu)) v_i = b_i`` with a block-diagonal regularizer holding one
multiplier per AP. Multipliers are found by coordinate bisection over the APs,
warm-started from the previous iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog

from src.baselines.mrt import mrt_baseline
from src.core.errors import NumericError
from src.metrics.power import ap_powers, project_power
from src.metrics.rates import covariances, sum_rate, vectors_to_beams
from src.models.baselines import WmmseConfig
from src.models.enums import ProjectionMode

logger = structlog.get_logger(__name__)


@dataclass(slots=True)
class WmmseResult:
    """Solver output."""

    beams: np.ndarray
    trace: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def sum_rate(self) -> float:
        return self.trace[-1] if self.trace else 0.0


class _BeamSystem:
    """Weighted least-squares system of one beamformer update."""

    def __init__(self, j: np.ndarray, b: np.ndarray, num_aps: int, antennas_per_ap: int) -> None:
        self.j = j
        self.b = b
        self.num_aps = num_aps
        self.m = antennas_per_ap

    def solve(self, mu: np.ndarray) -> np.ndarray:
        """Stacked beams ``(Q*M, I)`` for multipliers ``mu``."""
        reg = self.j + np.diag(np.repeat(mu, self.m))
        # minimum-norm solution keeps the mu -> 0 limit on singular systems
        x, *_ = np.linalg.lstsq(reg, self.b, rcond=None)
        return x

    def powers(self, x: np.ndarray) -> np.ndarray:
        blocks = x.reshape(self.num_aps, self.m, -1)
        return np.sum(np.abs(blocks) ** 2, axis=(1, 2))


def _bisect_ap(
    system: _BeamSystem, mu: np.ndarray, q: int, p_max: float, cfg: WmmseConfig
) -> float:
    """Smallest ``mu_q`` with AP ``q`` inside its budget, other multipliers fixed."""
    trial = mu.copy()
    trial[q] = 0.0
    if system.powers(system.solve(trial))[q] <= p_max:
        return 0.0

    lo, hi = 0.0, max(mu[q], 1.0)
    for _ in range(cfg.bisection_max_steps):
        trial[q] = hi
        if system.powers(system.solve(trial))[q] <= p_max:
            break
        lo, hi = hi, hi * 2.0

    for _ in range(cfg.bisection_max_steps):
        mid = 0.5 * (lo + hi)
        trial[q] = mid
        power = system.powers(system.solve(trial))[q]
        if power > p_max:
            lo = mid
        else:
            hi = mid
            if p_max - power <= cfg.bisection_tol * p_max:
                break
        if hi - lo <= cfg.bisection_tol * max(hi, 1e-300):
            break
    return hi


def _multipliers(
    system: _BeamSystem, mu: np.ndarray, p_max: float, cfg: WmmseConfig
) -> np.ndarray:
    """Gauss-Seidel sweeps of per-AP bisection until every AP satisfies slackness."""
    mu = mu.copy()
    for _ in range(cfg.max_sweeps):
        for q in range(system.num_aps):
            mu[q] = _bisect_ap(system, mu, q, p_max, cfg)
        powers = system.powers(system.solve(mu))
        feasible = powers <= p_max * (1.0 + cfg.bisection_tol)
        slack = (mu == 0.0) | (np.abs(powers - p_max) <= 10.0 * cfg.bisection_tol * p_max)
        if np.all(feasible & slack):
            break
    return mu


def wmmse_solve(
    h: np.ndarray,
    p_max: float,
    noise_power: float,
    cfg: WmmseConfig | None = None,
    *,
    num_aps: int,
    num_users: int,
) -> WmmseResult:
    """Run WMMSE from the MRT point.

    Args:
        h: Channel ``(I*N, Q*M)``.
        p_max: Per-AP power budget.
        noise_power: Receiver noise power.
        cfg: Stopping rules.
        num_aps: Q.
        num_users: I.

    Returns:
        Per-AP feasible beams and the sum-rate trace (initial point first).

    Raises:
        NumericError: If an intermediate quantity becomes non-finite.
    """
    cfg = cfg or WmmseConfig()
    if not np.all(np.isfinite(h)):
        raise NumericError("non-finite channel", iteration=0)
    if p_max <= 0 or noise_power <= 0:
        raise ValueError("power budget and noise power must be positive")
    m = h.shape[1] // num_aps

    beams = mrt_baseline(h, p_max, num_aps=num_aps, num_users=num_users)
    result = WmmseResult(beams=beams, trace=[sum_rate(h, beams, noise_power)])
    if not np.any(h):
        result.converged = True
        return result

    mu = np.zeros(num_aps)
    for it in range(1, cfg.max_iters + 1):
        hs, s, a, _ = covariances(h, beams, noise_power)
        own = s[np.arange(num_users), :, np.arange(num_users)]
        u = np.linalg.solve(a, own[..., None])[..., 0]
        e = 1.0 - np.real(np.einsum("in,in->i", u.conj(), own))
        if not np.all(np.isfinite(u)) or np.any(e <= 0):
            raise NumericError("receive filter or MSE became invalid", iteration=it)
        w = 1.0 / e

        g = np.einsum("inx,in->ix", hs.conj(), u)
        j = np.einsum("i,ix,iy->xy", w, g, g.conj())
        b = (g * w[:, None]).T
        system = _BeamSystem(j, b, num_aps, m)
        mu = _multipliers(system, mu, p_max, cfg)
        x = system.solve(mu)
        if not np.all(np.isfinite(x)):
            raise NumericError("beamformer update became non-finite", iteration=it)

        beams = project_power(vectors_to_beams(x.T, num_aps, m), p_max, ProjectionMode.EXACT)
        rate = sum_rate(h, beams, noise_power)
        previous = result.trace[-1]
        result.beams = beams
        result.trace.append(rate)
        result.iterations = it
        logger.debug("wmmse_iteration", iteration=it, sum_rate=rate, max_mu=float(mu.max()))
        if abs(rate - previous) <= cfg.rate_tol * max(abs(previous), 1e-12):
            result.converged = True
            break

    logger.debug(
        "wmmse_finished",
        iterations=result.iterations,
        converged=result.converged,
        sum_rate=result.sum_rate,
        max_ap_power=float(ap_powers(result.beams).max()),
    )
    return result

