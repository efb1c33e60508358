"""
Kernel two-sample discrepancies between feature distributions.

``rbf_mmd`` returns the squared MMD under the RBF kernel
``k(x, y) = exp(-||x - y||^2 / (2 h^2))``. ``gmmd`` averages it over feature
planes; the two gap diagnostics aggregate ``gmmd`` over channel families.
"""

from __future__ import annotations

from collections.abc import Sequence
from itertools import combinations

import numpy as np
import structlog
from sklearn.metrics.pairwise import euclidean_distances, rbf_kernel

from src.core.errors import ShapeError
from src.models.diagnostics import MMDConfig
from src.models.enums import MMDEstimator

logger = structlog.get_logger(__name__)


def _as_samples(x: np.ndarray | Sequence[float]) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"samples must be (n, d), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("sample sets must not be empty")
    return arr


def median_bandwidth(x: np.ndarray, y: np.ndarray) -> float:
    """Median pairwise distance of the pooled sample, 1.0 when it is zero."""
    pooled = np.vstack([x, y])
    dist = euclidean_distances(pooled)
    upper = dist[np.triu_indices(pooled.shape[0], k=1)]
    h = float(np.median(upper)) if upper.size else 0.0
    return h if h > 0 else 1.0


def _sorted_rows(samples: np.ndarray) -> np.ndarray:
    # lexsort treats its last key as primary
    return samples[np.lexsort(samples.T[::-1])]


def rbf_mmd(
    x: np.ndarray | Sequence[float],
    y: np.ndarray | Sequence[float],
    cfg: MMDConfig | None = None,
) -> float:
    """Squared maximum mean discrepancy between two sample sets.

    Rows are sorted and the pair is put in a canonical order first, so
    ``rbf_mmd(x, y)`` and ``rbf_mmd(y, x)`` run identical arithmetic and two
    copies of one multiset give exactly zero under the biased estimator.
    """
    cfg = cfg or MMDConfig()
    x = _as_samples(x)
    y = _as_samples(y)
    if x.shape[1] != y.shape[1]:
        raise ShapeError(f"sample dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    x, y = _sorted_rows(x), _sorted_rows(y)
    key_x, key_y = (x.shape, x.tobytes()), (y.shape, y.tobytes())
    if key_y < key_x:
        x, y = y, x
    elif key_y == key_x:
        # same object keeps sklearn on its exact self-distance path
        y = x

    h = median_bandwidth(x, y) if cfg.bandwidth is None else cfg.bandwidth
    gamma = 1.0 / (2.0 * h * h)
    kxx = rbf_kernel(x, x, gamma=gamma)
    kyy = rbf_kernel(y, y, gamma=gamma)
    kxy = rbf_kernel(x, y, gamma=gamma)
    m, n = x.shape[0], y.shape[0]

    if cfg.estimator == MMDEstimator.BIASED:
        value = kxx.mean() + kyy.mean() - 2.0 * kxy.mean()
    else:
        if m < 2 or n < 2:
            raise ValueError("unbiased estimator needs at least two samples per set")
        xx = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
        yy = (kyy.sum() - np.trace(kyy)) / (n * (n - 1))
        value = xx + yy - 2.0 * kxy.mean()
    return max(float(value), 0.0)


def _planes(features: np.ndarray) -> np.ndarray:
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim < 2:
        raise ShapeError(f"feature batch must be (B, ..., C), got {arr.shape}")
    return arr.reshape(arr.shape[0], -1, arr.shape[-1])


def gmmd(features_a: np.ndarray, features_b: np.ndarray, cfg: MMDConfig | None = None) -> float:
    """Average over channels of ``rbf_mmd`` between flattened feature planes.

    Args:
        features_a: Batch ``(B, W, H, C)`` (or ``(B, C)``) from one domain.
        features_b: Batch from the other domain, same plane size and C.
    """
    a = _planes(features_a)
    b = _planes(features_b)
    if a.shape[1:] != b.shape[1:]:
        raise ShapeError(f"feature planes differ: {a.shape[1:]} vs {b.shape[1:]}")
    channels = a.shape[-1]
    total = sum(rbf_mmd(a[:, :, c], b[:, :, c], cfg) for c in range(channels))
    return total / channels


def source_gap_diag(batches: Sequence[np.ndarray], cfg: MMDConfig | None = None) -> float:
    """Largest pairwise ``gmmd`` among the source feature batches."""
    if len(batches) < 2:
        raise ValueError("source gap needs at least two source batches")
    gaps = [gmmd(a, b, cfg) for a, b in combinations(batches, 2)]
    logger.debug("source_gap_pairs", pairs=len(gaps), gaps=gaps)
    return max(gaps)


def target_gap_diag(
    sources: Sequence[np.ndarray], target: np.ndarray, cfg: MMDConfig | None = None
) -> float:
    """``gmmd`` between an equal-weight mixture of the sources and the target.

    The mixture takes the first ``min`` batch-size samples of every source, so
    each family carries weight ``1/T``.
    """
    if not sources:
        raise ValueError("target gap needs at least one source batch")
    per_source = min(s.shape[0] for s in sources)
    mixture = np.concatenate([s[:per_source] for s in sources], axis=0)
    return gmmd(mixture, target, cfg)
