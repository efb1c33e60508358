"""Sum-rate, power and domain-gap metrics."""

from src.metrics.mmd import gmmd, median_bandwidth, rbf_mmd, source_gap_diag, target_gap_diag
from src.metrics.power import (
    ap_powers,
    is_feasible,
    per_ap_power,
    project_power,
    projection_scale,
)
from src.metrics.rates import (
    beams_to_vectors,
    covariances,
    sum_rate,
    user_blocks,
    user_rate,
    user_rates,
    vectors_to_beams,
)

__all__ = [
    "ap_powers",
    "beams_to_vectors",
    "covariances",
    "gmmd",
    "is_feasible",
    "median_bandwidth",
    "per_ap_power",
    "project_power",
    "projection_scale",
    "rbf_mmd",
    "source_gap_diag",
    "sum_rate",
    "target_gap_diag",
    "user_blocks",
    "user_rate",
    "user_rates",
    "vectors_to_beams",
]
