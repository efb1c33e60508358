"""Synthetic cell-free channel generation and dataset persistence."""

from src.channel_sim.dataset import gen_dataset, load_dataset, load_manifest, load_period
from src.channel_sim.generators import (
    complex_normal,
    gen_channel,
    gen_multipath,
    gen_rician,
    generate_sample,
    generate_samples,
    sample_rng,
)
from src.channel_sim.geometry import Geometry, pathloss_beta, place_nodes, steering_vector

__all__ = [
    "Geometry",
    "complex_normal",
    "gen_channel",
    "gen_dataset",
    "gen_multipath",
    "gen_rician",
    "generate_sample",
    "generate_samples",
    "load_dataset",
    "load_manifest",
    "load_period",
    "pathloss_beta",
    "place_nodes",
    "sample_rng",
    "steering_vector",
]
