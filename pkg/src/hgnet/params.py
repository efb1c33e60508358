"""
Learnable state of HGNet.

Parameters are grouped per layer: convolution kernels and bias, the batch-norm
affine pair (the only groups online adaptation touches), the running
statistics, and for layers 1..L-1 the discriminator head.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np

from src.diffnum import BatchNormState, ParamGroup
from src.models.network import HGNetConfig, ParameterCensus


@dataclass(slots=True)
class LayerParams:
    """Parameter groups of one convolution layer."""

    kernels: ParamGroup
    bias: ParamGroup
    gamma: ParamGroup
    beta: ParamGroup
    bn: BatchNormState
    disc_weights: ParamGroup | None = None
    disc_bias: ParamGroup | None = None

    def groups(self) -> Iterator[ParamGroup]:
        yield self.kernels
        yield self.bias
        yield self.gamma
        yield self.beta
        if self.disc_weights is not None and self.disc_bias is not None:
            yield self.disc_weights
            yield self.disc_bias

    @property
    def has_discriminator(self) -> bool:
        return self.disc_weights is not None


@dataclass(slots=True)
class HGNetParams:
    """All groups of a network in declared order.

    Attributes:
        layers: Per-layer groups.
        class_ids: Channel-model label represented by each discriminator class.
    """

    layers: list[LayerParams]
    class_ids: list[int] = field(default_factory=list)

    def groups(self) -> list[ParamGroup]:
        return [g for layer in self.layers for g in layer.groups()]

    def affine_groups(self) -> list[ParamGroup]:
        return [g for g in self.groups() if g.affine]

    def bn_states(self) -> list[BatchNormState]:
        return [layer.bn for layer in self.layers]

    def set_trainable(self, *, affine_only: bool) -> None:
        """Mark every group trainable, or only the BN affine groups."""
        for group in self.groups():
            group.set_trainable(group.affine or not affine_only)

    def class_index(self, labels: np.ndarray) -> np.ndarray:
        """Map channel-model labels to discriminator class indices.

        Raises:
            ValueError: If a label is not one of ``class_ids``.
        """
        lookup = {label: idx for idx, label in enumerate(self.class_ids)}
        try:
            return np.array([lookup[int(label)] for label in labels], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"label {exc.args[0]} not among classes {self.class_ids}") from exc

    def copy(self) -> HGNetParams:
        """Deep copy with independent values, gradients and statistics."""

        def dup(group: ParamGroup) -> ParamGroup:
            clone = ParamGroup.of(group.name, group.values.data, affine=group.affine)
            clone.set_trainable(group.trainable)
            return clone

        layers = [
            LayerParams(
                kernels=dup(layer.kernels),
                bias=dup(layer.bias),
                gamma=dup(layer.gamma),
                beta=dup(layer.beta),
                bn=layer.bn.copy(),
                disc_weights=_maybe(dup, layer.disc_weights),
                disc_bias=_maybe(dup, layer.disc_bias),
            )
            for layer in self.layers
        ]
        return HGNetParams(layers=layers, class_ids=list(self.class_ids))


def _maybe(
    fn: Callable[[ParamGroup], ParamGroup], group: ParamGroup | None
) -> ParamGroup | None:
    return None if group is None else fn(group)


def init_params(cfg: HGNetConfig, seed: int = 0) -> HGNetParams:
    """He-initialized kernels, unit BN scale, zero shifts and biases."""
    rng = np.random.default_rng(seed)
    layers: list[LayerParams] = []
    last = cfg.num_layers - 1
    for index, spec in enumerate(cfg.layers):
        c_in = cfg.layer_input_channels(index)
        c_out = spec.channels
        fan_in = spec.kernel_w * spec.kernel_h * c_in
        shape = (spec.kernel_w, spec.kernel_h, c_in, c_out)
        kernels = rng.normal(0.0, np.sqrt(2.0 / fan_in), shape)
        prefix = f"layer{index + 1}"
        layer = LayerParams(
            kernels=ParamGroup.of(f"{prefix}.kernels", kernels),
            bias=ParamGroup.of(f"{prefix}.bias", np.zeros(c_out)),
            gamma=ParamGroup.of(f"{prefix}.gamma", np.ones(c_out), affine=True),
            beta=ParamGroup.of(f"{prefix}.beta", np.zeros(c_out), affine=True),
            bn=BatchNormState.fresh(c_out),
        )
        if index < last:
            weights = rng.normal(0.0, np.sqrt(1.0 / c_out), (cfg.num_classes, c_out))
            layer.disc_weights = ParamGroup.of(f"{prefix}.disc_weights", weights)
            layer.disc_bias = ParamGroup.of(f"{prefix}.disc_bias", np.zeros(cfg.num_classes))
        layers.append(layer)
    return HGNetParams(layers=layers, class_ids=list(range(cfg.num_classes)))


def count_parameters(params: HGNetParams) -> ParameterCensus:
    """Census of learnable values; BN running statistics are not counted."""
    conv = affine = disc = 0
    for layer in params.layers:
        conv += layer.kernels.size + layer.bias.size
        affine += layer.gamma.size + layer.beta.size
        if layer.disc_weights is not None and layer.disc_bias is not None:
            disc += layer.disc_weights.size + layer.disc_bias.size
    return ParameterCensus(total=conv + affine + disc, conv=conv, affine=affine, discriminator=disc)
