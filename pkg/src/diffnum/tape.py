"""
Reverse-mode gradient tape and parameter groups.

Every differentiable op appends one record holding its inputs, its output and a
backward closure. Replaying the tape walks the records in exact reverse order,
visiting each once, and accumulates gradients keyed by tensor identity.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import structlog

from src.core.errors import ShapeError
from src.diffnum.tensor import TensorR

logger = structlog.get_logger(__name__)

# Receives the upstream gradient and which inputs need a gradient; returns one
# entry per input, None where no gradient is produced.
BackwardFn = Callable[[np.ndarray, tuple[bool, ...]], tuple[np.ndarray | None, ...]]


@dataclass(slots=True)
class OpRecord:
    """One executed op."""

    op: str
    inputs: tuple[TensorR, ...]
    output: TensorR
    backward: BackwardFn


class GradTape:
    """Ordered record of executed ops with gradient accumulation buffers."""

    def __init__(self) -> None:
        self.records: list[OpRecord] = []
        self.visited: list[int] = []
        self._grads: dict[int, np.ndarray] = {}
        self._replayed = False

    def __len__(self) -> int:
        return len(self.records)

    def record(
        self, op: str, inputs: Sequence[TensorR], out: np.ndarray, backward: BackwardFn
    ) -> TensorR:
        """Wrap ``out`` in a tensor and record the op if any input needs a gradient."""
        needs_grad = any(t.requires_grad for t in inputs)
        output = TensorR(out, requires_grad=needs_grad)
        if needs_grad:
            self.records.append(OpRecord(op, tuple(inputs), output, backward))
        return output

    def census(self) -> Counter[str]:
        """Number of recorded ops per op id."""
        return Counter(r.op for r in self.records)

    def backward(self, seeds: Mapping[TensorR, np.ndarray | float] | TensorR) -> GradTape:
        """Propagate gradients from one or more seeded outputs.

        Args:
            seeds: Either a scalar tensor (seeded with 1.0) or a mapping from
                recorded outputs to their upstream gradients.

        Returns:
            The tape, for chaining ``grad`` lookups.
        """
        if self._replayed:
            raise RuntimeError("gradient tape has already been replayed")
        self._replayed = True

        if isinstance(seeds, TensorR):
            seeds = {seeds: np.ones(seeds.shape)}
        for tensor, seed in seeds.items():
            g = np.broadcast_to(np.asarray(seed, dtype=np.float64), tensor.shape)
            self._accumulate(tensor, g)

        for index in range(len(self.records) - 1, -1, -1):
            rec = self.records[index]
            self.visited.append(index)
            upstream = self._grads.get(id(rec.output))
            if upstream is None:
                continue
            needs = tuple(t.requires_grad for t in rec.inputs)
            grads = rec.backward(upstream, needs)
            for tensor, grad in zip(rec.inputs, grads, strict=True):
                if grad is not None and tensor.requires_grad:
                    self._accumulate(tensor, grad)

        logger.debug("tape_replayed", ops=len(self.records))
        return self

    def grad(self, tensor: TensorR) -> np.ndarray:
        """Accumulated gradient of ``tensor``; exactly zero when it was never reached."""
        g = self._grads.get(id(tensor))
        if g is None:
            return np.zeros(tensor.shape)
        return g

    def _accumulate(self, tensor: TensorR, grad: np.ndarray) -> None:
        if grad.shape != tensor.shape:
            raise ShapeError(
                f"gradient shape {grad.shape} does not match tensor shape {tensor.shape}"
            )
        key = id(tensor)
        if key in self._grads:
            self._grads[key] = self._grads[key] + grad
        else:
            self._grads[key] = np.array(grad, dtype=np.float64)


@dataclass(slots=True, eq=False)
class ParamGroup:
    """Named block of learnable values with its gradient buffer.

    ``affine`` marks BN scale/shift groups, the only ones online adaptation
    may touch.
    """

    name: str
    values: TensorR
    grad: TensorR = field(init=False)
    affine: bool = False

    def __post_init__(self) -> None:
        self.values.name = self.name
        self.values.requires_grad = True
        self.grad = TensorR.zeros(self.values.shape)

    @classmethod
    def of(cls, name: str, values: np.ndarray, affine: bool = False) -> ParamGroup:
        """Build a group owning a private copy of ``values``."""
        return cls(name, TensorR(np.array(values, dtype=np.float64)), affine=affine)

    @property
    def trainable(self) -> bool:
        return self.values.requires_grad

    def set_trainable(self, flag: bool) -> None:
        self.values.requires_grad = flag
        if not flag:
            self.zero_grad()

    @property
    def size(self) -> int:
        return self.values.size

    def zero_grad(self) -> None:
        self.grad.data[...] = 0.0

    def collect(self, tape: GradTape) -> None:
        """Copy this group's gradient out of a replayed tape."""
        if self.trainable:
            self.grad.data[...] = tape.grad(self.values)
        else:
            self.grad.data[...] = 0.0
