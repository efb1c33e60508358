"""
Dense real and complex tensors.

Layout is row-major with the channel axis last. Batched activations are
``(B, W, H, C)`` where W indexes APs and H indexes users.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.core.errors import NumericError, ShapeError


class TensorR:
    """Real 64-bit tensor that can take part in reverse-mode differentiation."""

    __slots__ = ("data", "requires_grad", "name")

    def __init__(
        self,
        data: np.ndarray | Sequence[float] | float,
        requires_grad: bool = False,
        name: str | None = None,
    ) -> None:
        self.data: np.ndarray = _contiguous(data, np.float64)
        self.requires_grad = requires_grad
        self.name = name

    @classmethod
    def zeros(
        cls, shape: tuple[int, ...], requires_grad: bool = False, name: str | None = None
    ) -> TensorR:
        """All-zero tensor of ``shape``."""
        return cls(np.zeros(shape), requires_grad=requires_grad, name=name)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def copy(self) -> TensorR:
        """Detached deep copy."""
        return TensorR(self.data.copy(), requires_grad=self.requires_grad, name=self.name)

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single value, tensor has shape {self.shape}")
        return float(self.data.reshape(()))

    def check_finite(self, where: str, iteration: int | None = None) -> TensorR:
        """Raise ``NumericError`` if any value is NaN or infinite."""
        if not np.all(np.isfinite(self.data)):
            raise NumericError(f"non-finite value in {where}", iteration=iteration)
        return self

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"TensorR(shape={self.shape}{label}, requires_grad={self.requires_grad})"


class TensorC:
    """Complex tensor with 64-bit real and imaginary components."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | Sequence[complex] | complex) -> None:
        self.data: np.ndarray = _contiguous(data, np.complex128)

    @classmethod
    def from_parts(cls, re: np.ndarray, im: np.ndarray) -> TensorC:
        """Assemble from real and imaginary parts of equal shape."""
        if np.shape(re) != np.shape(im):
            raise ShapeError(f"real part {np.shape(re)} and imaginary part {np.shape(im)} differ")
        return cls(np.asarray(re, dtype=np.float64) + 1j * np.asarray(im, dtype=np.float64))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def re(self) -> np.ndarray:
        return self.data.real

    @property
    def im(self) -> np.ndarray:
        return self.data.imag

    def conj_transpose(self) -> TensorC:
        """Hermitian transpose over the last two axes."""
        if self.data.ndim < 2:
            raise ShapeError("conjugate transpose needs at least two axes")
        return TensorC(np.conj(np.swapaxes(self.data, -1, -2)))

    def check_finite(self, where: str, iteration: int | None = None) -> TensorC:
        if not np.all(np.isfinite(self.data)):
            raise NumericError(f"non-finite value in {where}", iteration=iteration)
        return self

    def __repr__(self) -> str:
        return f"TensorC(shape={self.shape})"


def _contiguous(data: object, dtype: type) -> np.ndarray:
    # ascontiguousarray would promote 0-d scalars to 1-d
    arr = np.asarray(data, dtype=dtype)
    if not arr.flags.c_contiguous:
        arr = arr.copy()
    return arr
