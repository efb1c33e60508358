"""
Finite-difference verification of reverse-mode gradients.

``grad_check`` drives an op through a scalar probe: the op output is
contracted with fixed random weights, the tape is replayed with those weights
as the seed, and every input element is compared against a central
difference.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping

import numpy as np
import structlog

from src.diffnum.tape import GradTape
from src.diffnum.tensor import TensorR
from src.models.diagnostics import ArgumentCheck, GradCheckReport

logger = structlog.get_logger(__name__)

FD_STEP = 1e-5
DEFAULT_TOLERANCE = 1e-4

# Denominator floor of the relative error, so gradients that are zero up to
# round-off compare in absolute terms.
REL_FLOOR = 1e-4

OpUnderTest = Callable[[Mapping[str, TensorR], GradTape | None], TensorR]


def grad_check(
    op: OpUnderTest,
    inputs: Mapping[str, np.ndarray],
    tolerance: float = DEFAULT_TOLERANCE,
    step: float = FD_STEP,
    seed: int = 0,
    name: str = "op",
    wrt: tuple[str, ...] | None = None,
) -> GradCheckReport:
    """Compare reverse-mode and central-difference gradients of ``op``.

    Args:
        op: Callable receiving the input tensors by name and an optional tape.
            It must be deterministic.
        inputs: Input values by name.
        tolerance: Pass threshold on the max relative error per argument.
        step: Central-difference step.
        seed: Seed of the random output weights.
        name: Op name recorded in the report.
        wrt: Arguments to check; all of them when None.

    Returns:
        Report with the max relative error per argument. Failures are
        reported, never raised.
    """
    checked = tuple(wrt) if wrt is not None else tuple(inputs)
    base = {k: np.array(v, dtype=np.float64) for k, v in inputs.items()}

    tape = GradTape()
    tensors = {k: TensorR(v.copy(), requires_grad=k in checked, name=k) for k, v in base.items()}
    out = op(tensors, tape)
    weights = np.random.default_rng(seed).uniform(0.5, 1.5, size=out.shape)
    tape.backward({out: weights})

    def probe(values: dict[str, np.ndarray]) -> float:
        result = op({k: TensorR(v) for k, v in values.items()}, None)
        return float(np.sum(result.data * weights))

    report_args: list[ArgumentCheck] = []
    for arg in checked:
        analytic = tape.grad(tensors[arg])
        numeric = np.zeros_like(base[arg])
        flat = base[arg].reshape(-1)
        num_flat = numeric.reshape(-1)
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + step
            f_plus = probe(base)
            flat[idx] = original - step
            f_minus = probe(base)
            flat[idx] = original
            num_flat[idx] = (f_plus - f_minus) / (2.0 * step)
        abs_err = np.abs(analytic - numeric)
        denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), REL_FLOOR)
        report_args.append(
            ArgumentCheck(
                argument=arg,
                max_rel_error=float((abs_err / denom).max(initial=0.0)),
                max_abs_error=float(abs_err.max(initial=0.0)),
            )
        )

    report = GradCheckReport(op=name, tolerance=tolerance, arguments=report_args)
    logger.debug("grad_check_completed", op=name, passed=report.passed)
    return report
