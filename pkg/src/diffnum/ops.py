"""
Differentiable operations.

Every op takes an optional ``tape``. Without a tape the op runs as a plain
numpy computation; with one it records a backward closure whenever an input
requires a gradient. Activations are batched ``(B, W, H, C)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core.errors import ArchitectureError, DegenerateBatchError, ShapeError
from src.diffnum.tape import BackwardFn, GradTape
from src.diffnum.tensor import TensorR
from src.models.enums import ActivationKind, ForwardMode, ProjectionMode

# Magnitudes below this are treated as constant in the entropy objective.
MAGNITUDE_FLOOR = 1e-12


def _finish(
    tape: GradTape | None,
    op: str,
    inputs: tuple[TensorR, ...],
    out: np.ndarray,
    backward: BackwardFn,
) -> TensorR:
    if tape is None:
        return TensorR(out)
    return tape.record(op, inputs, out, backward)


def conv_output_size(size: int, kernel: int, stride: int, pad: int) -> int:
    """Output length of a strided, zero-padded convolution along one axis.

    Raises:
        ArchitectureError: If the output length is not a positive integer.
    """
    span = size + 2 * pad - kernel
    if span < 0 or span % stride != 0:
        raise ArchitectureError(
            f"(size {size} + 2*pad {pad} - kernel {kernel}) / stride {stride} + 1 "
            "is not a positive integer"
        )
    return span // stride + 1


def conv2d(
    x: TensorR,
    kernels: TensorR,
    bias: TensorR,
    stride: tuple[int, int] = (1, 1),
    padding: tuple[int, int] = (0, 0),
    tape: GradTape | None = None,
) -> TensorR:
    """2-D convolution of a ``(B, W, H, Cin)`` batch with ``(k_w, k_h, Cin, Cout)`` kernels."""
    if x.ndim != 4 or kernels.ndim != 4:
        raise ShapeError(f"conv2d expects 4-D input and kernels, got {x.shape} and {kernels.shape}")
    _, width, height, c_in = x.shape
    k_w, k_h, k_cin, c_out = kernels.shape
    if k_cin != c_in:
        raise ShapeError(f"kernel input channels {k_cin} do not match input channels {c_in}")
    if bias.shape != (c_out,):
        raise ShapeError(f"bias shape {bias.shape} does not match {c_out} output channels")
    s_w, s_h = stride
    p_w, p_h = padding
    out_w = conv_output_size(width, k_w, s_w, p_w)
    out_h = conv_output_size(height, k_h, s_h, p_h)

    xp = np.pad(x.data, ((0, 0), (p_w, p_w), (p_h, p_h), (0, 0)))
    windows = sliding_window_view(xp, (k_w, k_h), axis=(1, 2))[:, ::s_w, ::s_h]
    k = kernels.data
    out = np.einsum("bwhcij,ijcd->bwhd", windows, k, optimize=True) + bias.data

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        dx = dk = db = None
        if needs[0]:
            dxp = np.zeros_like(xp)
            w_stop = s_w * (out_w - 1) + 1
            h_stop = s_h * (out_h - 1) + 1
            for i in range(k_w):
                for j in range(k_h):
                    dxp[:, i : i + w_stop : s_w, j : j + h_stop : s_h, :] += np.einsum(
                        "bwhd,cd->bwhc", g, k[i, j]
                    )
            dx = dxp[:, p_w : p_w + width, p_h : p_h + height, :]
        if needs[1]:
            dk = np.einsum("bwhcij,bwhd->ijcd", windows, g, optimize=True)
        if needs[2]:
            db = g.sum(axis=(0, 1, 2))
        return dx, dk, db

    return _finish(tape, "conv2d", (x, kernels, bias), out, backward)


@dataclass(slots=True)
class BatchNormState:
    """Running statistics of one BN layer.

    The stored values are the average over all batches seen so far of the batch
    mean and of the unbiased batch variance ``B/(B-1) * var``.
    """

    running_mean: np.ndarray
    running_var: np.ndarray
    batches_seen: int = 0

    @classmethod
    def fresh(cls, channels: int) -> BatchNormState:
        return cls(np.zeros(channels), np.ones(channels), 0)

    @property
    def populated(self) -> bool:
        return self.batches_seen > 0

    def update(self, mean: np.ndarray, biased_var: np.ndarray, batch: int) -> None:
        n = self.batches_seen
        unbiased = biased_var * (batch / (batch - 1))
        if n == 0:
            self.running_mean = np.array(mean, dtype=np.float64)
            self.running_var = np.array(unbiased, dtype=np.float64)
        else:
            self.running_mean = (self.running_mean * n + mean) / (n + 1)
            self.running_var = (self.running_var * n + unbiased) / (n + 1)
        self.batches_seen = n + 1

    def reset(self) -> None:
        self.running_mean = np.zeros_like(self.running_mean)
        self.running_var = np.ones_like(self.running_var)
        self.batches_seen = 0

    def copy(self) -> BatchNormState:
        return BatchNormState(
            self.running_mean.copy(), self.running_var.copy(), self.batches_seen
        )


def batchnorm(
    x: TensorR,
    gamma: TensorR,
    beta: TensorR,
    state: BatchNormState,
    mode: ForwardMode = ForwardMode.TRAIN,
    eps: float = 1e-5,
    tape: GradTape | None = None,
    update_stats: bool = True,
    affine_only: bool = False,
) -> TensorR:
    """Batch normalization over the ``(B, W, H)`` axes followed by a per-channel affine map.

    Args:
        x: Activations ``(B, W, H, C)``.
        gamma: Per-channel scale.
        beta: Per-channel shift.
        state: Running statistics, updated in train mode when ``update_stats``.
        mode: Train uses batch statistics, infer uses running statistics.
        eps: Variance floor.
        tape: Gradient tape.
        update_stats: Whether train mode folds the batch into ``state``.
        affine_only: Backward produces gradients for gamma and beta only.

    Raises:
        DegenerateBatchError: Train mode with a single sample, or infer mode
            before any statistics were collected.
    """
    if x.ndim != 4:
        raise ShapeError(f"batchnorm expects (B, W, H, C) input, got {x.shape}")
    channels = x.shape[-1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise ShapeError(f"affine shapes {gamma.shape}, {beta.shape} do not match {channels}")

    batch = x.shape[0]
    if mode == ForwardMode.TRAIN:
        if batch < 2:
            raise DegenerateBatchError("train-mode batch normalization needs at least 2 samples")
        mean = x.data.mean(axis=(0, 1, 2))
        var = x.data.var(axis=(0, 1, 2))
        if update_stats:
            state.update(mean, var, batch)
    else:
        if not state.populated:
            raise DegenerateBatchError("inference batch normalization needs running statistics")
        mean = state.running_mean
        var = state.running_var

    denom = np.sqrt(var + eps)
    inv_std = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom > 0)
    xhat = (x.data - mean) * inv_std
    out = gamma.data * xhat + beta.data
    train = mode == ForwardMode.TRAIN
    count = x.data.size // channels

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        dx = None
        if needs[0] and not affine_only:
            dxhat = g * gamma.data
            if train:
                dx = (inv_std / count) * (
                    count * dxhat
                    - dxhat.sum(axis=(0, 1, 2))
                    - xhat * (dxhat * xhat).sum(axis=(0, 1, 2))
                )
            else:
                dx = dxhat * inv_std
        dgamma = (g * xhat).sum(axis=(0, 1, 2)) if needs[1] else None
        dbeta = g.sum(axis=(0, 1, 2)) if needs[2] else None
        return dx, dgamma, dbeta

    return _finish(tape, "batchnorm", (x, gamma, beta), out, backward)


def activation(x: TensorR, kind: ActivationKind, tape: GradTape | None = None) -> TensorR:
    """Elementwise ReLU or tanh."""
    if kind == ActivationKind.RELU:
        out = np.maximum(x.data, 0.0)

        def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
            return (g * (x.data > 0),)

    else:
        out = np.tanh(x.data)

        def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
            return (g * (1.0 - out * out),)

    return _finish(tape, str(kind), (x,), out, backward)


def grl(x: TensorR, lam: float = 1.0, tape: GradTape | None = None) -> TensorR:
    """Gradient reversal: identity forward, ``-lam`` times the upstream gradient backward."""
    if lam < 0:
        raise ValueError("gradient reversal scale must be non-negative")

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        return (-lam * g,)

    return _finish(tape, "grl", (x,), x.data.copy(), backward)


def gap(x: TensorR, tape: GradTape | None = None) -> TensorR:
    """Global average pooling of ``(..., W, H, C)`` to ``(..., C)``."""
    if x.ndim < 3:
        raise ShapeError(f"gap expects (..., W, H, C) input, got {x.shape}")
    width, height = x.shape[-3], x.shape[-2]
    out = x.data.mean(axis=(-3, -2))

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        spread = np.broadcast_to(g[..., None, None, :], x.shape) / (width * height)
        return (np.array(spread),)

    return _finish(tape, "gap", (x,), out, backward)


def fc(x: TensorR, weights: TensorR, bias: TensorR, tape: GradTape | None = None) -> TensorR:
    """Fully connected map ``(..., C) -> (..., T)`` with ``(T, C)`` weights."""
    if weights.ndim != 2 or x.shape[-1] != weights.shape[1] or bias.shape != weights.shape[:1]:
        raise ShapeError(
            f"fc shapes disagree: input {x.shape}, weights {weights.shape}, bias {bias.shape}"
        )
    out = x.data @ weights.data.T + bias.data

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        dx = g @ weights.data if needs[0] else None
        g2 = g.reshape(-1, g.shape[-1])
        x2 = x.data.reshape(-1, x.shape[-1])
        dw = g2.T @ x2 if needs[1] else None
        db = g2.sum(axis=0) if needs[2] else None
        return dx, dw, db

    return _finish(tape, "fc", (x, weights, bias), out, backward)


def add(a: TensorR, b: TensorR, tape: GradTape | None = None) -> TensorR:
    """Elementwise sum of equally shaped tensors."""
    if a.shape != b.shape:
        raise ShapeError(f"cannot add shapes {a.shape} and {b.shape}")

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        return (g if needs[0] else None, g if needs[1] else None)

    return _finish(tape, "add", (a, b), a.data + b.data, backward)


def channel_mask(x: TensorR, mask: np.ndarray, tape: GradTape | None = None) -> TensorR:
    """Multiply channel planes of ``(B, W, H, C)`` by a ``(B, C)`` or ``(C,)`` mask."""
    channels = x.shape[-1]
    m = np.asarray(mask, dtype=np.float64)
    if m.shape[-1] != channels or (m.ndim == 2 and m.shape[0] != x.shape[0]) or m.ndim > 2:
        raise ShapeError(f"mask shape {m.shape} does not match activations {x.shape}")
    m4 = m[:, None, None, :] if m.ndim == 2 else m
    out = x.data * m4

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        return (g * m4,)

    return _finish(tape, "mask", (x,), out, backward)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_cross_entropy(
    logits: TensorR, labels: np.ndarray, tape: GradTape | None = None
) -> TensorR:
    """Mean cross-entropy of ``(B, T)`` logits against integer labels, as a scalar."""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ShapeError(f"logits {logits.shape} and labels {labels.shape} disagree")
    num_classes = logits.shape[1]
    if np.any(labels < 0) or np.any(labels >= num_classes):
        raise ValueError(f"labels must lie in [0, {num_classes})")
    logp = log_softmax(logits.data)
    rows = np.arange(labels.size)
    loss = -logp[rows, labels].mean()

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        probs = np.exp(logp)
        probs[rows, labels] -= 1.0
        return (probs * (float(g) / labels.size),)

    return _finish(tape, "cross_entropy", (logits,), np.asarray(loss), backward)


def ap_powers(x: np.ndarray) -> np.ndarray:
    """Per-AP transmit power of a real-stacked ``(B, Q, I, 2M)`` beam batch, shape ``(B, Q)``."""
    return np.einsum("bqic,bqic->bq", x, x)


def project_power(
    x: TensorR,
    p_max: float,
    mode: ProjectionMode = ProjectionMode.EXACT,
    tape: GradTape | None = None,
) -> TensorR:
    """Scale each AP's beams of a real-stacked ``(B, Q, I, 2M)`` batch onto the power budget.

    Exact mode multiplies by ``sqrt(p_max / p)``; linear mode by ``p_max / p``.
    APs already within budget pass through unchanged.
    """
    if x.ndim != 4:
        raise ShapeError(f"power projection expects (B, Q, I, 2M), got {x.shape}")
    power = ap_powers(x.data)
    over = power > p_max
    safe = np.where(over, power, 1.0)
    if mode == ProjectionMode.EXACT:
        scale = np.where(over, np.sqrt(p_max / safe), 1.0)
        slope = 1.0
    else:
        scale = np.where(over, p_max / safe, 1.0)
        slope = 2.0
    s4 = scale[:, :, None, None]
    out = x.data * s4

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        inner = np.einsum("bqic,bqic->bq", x.data, g)
        corr = np.where(over, slope * inner / safe, 0.0)[:, :, None, None]
        return (s4 * (g - x.data * corr),)

    return _finish(tape, "project_power", (x,), out, backward)


def magnitude_entropy(x: TensorR, antennas: int, tape: GradTape | None = None) -> TensorR:
    """Sum of ``|a log a|`` over the complex magnitudes of a real-stacked ``(..., 2M)`` tensor.

    Channels ``[:M]`` hold real parts and ``[M:]`` imaginary parts. Magnitudes
    below ``MAGNITUDE_FLOOR`` are clamped and contribute no gradient.
    """
    if x.shape[-1] != 2 * antennas:
        raise ShapeError(f"last axis {x.shape[-1]} is not 2*M for M={antennas}")
    re = x.data[..., :antennas]
    im = x.data[..., antennas:]
    mag = np.sqrt(re * re + im * im)
    live = mag >= MAGNITUDE_FLOOR
    a = np.where(live, mag, MAGNITUDE_FLOOR)
    log_a = np.log(a)
    terms = np.where(live, a * log_a, 0.0)
    loss = np.abs(terms).sum()

    def backward(g: np.ndarray, needs: tuple[bool, ...]) -> tuple[np.ndarray | None, ...]:
        d_mag = np.where(live, np.sign(terms) * (log_a + 1.0) / a, 0.0) * float(g)
        return (np.concatenate([d_mag * re, d_mag * im], axis=-1),)

    return _finish(tape, "entropy", (x,), np.asarray(loss), backward)
