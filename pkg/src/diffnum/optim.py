"""Adaptive-moment optimizer over parameter groups."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.diffnum.tape import ParamGroup


class Adam:
    """Adam with bias correction, updating group values in place.

    Only trainable groups are stepped; frozen groups keep their values
    bit-identical.
    """

    def __init__(
        self,
        groups: Sequence[ParamGroup],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.groups = list(groups)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self._m = {id(g): np.zeros(g.values.shape) for g in self.groups}
        self._v = {id(g): np.zeros(g.values.shape) for g in self.groups}

    def step(self) -> None:
        self.steps += 1
        t = self.steps
        c1 = 1.0 - self.beta1**t
        c2 = 1.0 - self.beta2**t
        for group in self.groups:
            if not group.trainable:
                continue
            g = group.grad.data
            m = self._m[id(group)]
            v = self._v[id(group)]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            group.values.data -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def zero_grad(self) -> None:
        for group in self.groups:
            group.zero_grad()
