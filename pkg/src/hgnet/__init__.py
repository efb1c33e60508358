"""HGNet: size-agnostic convolutional beamformer with a high-generalization module."""

from src.hgnet.architecture import (
    input_batch,
    input_transform,
    preserving_padding,
    validate_architecture,
)
from src.hgnet.checkpoint import load_checkpoint, save_checkpoint
from src.hgnet.generalization import (
    apply_mask,
    discriminator_loss,
    drop_probs,
    feature_scores,
    mask_from_keys,
    wrs_keys,
    wrs_mask,
)
from src.hgnet.loss import batch_rate_loss, rate_loss_grad
from src.hgnet.model import (
    ForwardTrace,
    LayerTrace,
    assemble_output,
    feature_batches,
    forward,
    infer_beams,
    residual_input,
    residual_projection,
)
from src.hgnet.params import HGNetParams, LayerParams, count_parameters, init_params
from src.hgnet.train import (
    BatchLoss,
    TrainResult,
    batch_loss,
    calibrate_running_stats,
    make_batches,
    train,
)

__all__ = [
    "BatchLoss",
    "ForwardTrace",
    "HGNetParams",
    "LayerParams",
    "LayerTrace",
    "TrainResult",
    "apply_mask",
    "assemble_output",
    "batch_loss",
    "batch_rate_loss",
    "calibrate_running_stats",
    "count_parameters",
    "discriminator_loss",
    "drop_probs",
    "feature_batches",
    "feature_scores",
    "forward",
    "infer_beams",
    "init_params",
    "input_batch",
    "input_transform",
    "load_checkpoint",
    "make_batches",
    "mask_from_keys",
    "preserving_padding",
    "rate_loss_grad",
    "residual_input",
    "residual_projection",
    "save_checkpoint",
    "train",
    "validate_architecture",
    "wrs_keys",
    "wrs_mask",
]
