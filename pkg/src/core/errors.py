"""Exception hierarchy for the beamforming lab.

Every error raised on purpose by the lab derives from ``LabError`` and from the
closest built-in exception, so callers can catch either.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all lab errors."""


class ShapeError(LabError, ValueError):
    """Tensor or record shapes do not agree."""


class ArchitectureError(LabError, ValueError):
    """A convolution layout cannot produce integral, positive output sizes."""


class DegenerateBatchError(LabError, ValueError):
    """Batch statistics were requested for a batch that cannot provide them."""


class NumericError(LabError, ArithmeticError):
    """A computation produced a non-finite value.

    Attributes:
        iteration: Iteration (or epoch) at which the value appeared, if known.
    """

    def __init__(self, message: str, iteration: int | None = None) -> None:
        """Initialize with an optional iteration index.

        Args:
            message: Human readable description.
            iteration: Iteration index where the failure was detected.
        """
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


class TrainingError(NumericError):
    """Training diverged; ``iteration`` holds the epoch index."""


class PersistenceError(LabError, OSError):
    """Reading or writing a dataset, checkpoint or report failed."""


class ConfigError(LabError, ValueError):
    """An experiment refers to inputs that are missing or inconsistent."""


class FeasibilityError(LabError, AssertionError):
    """An emitted beamformer violates the per-AP power constraint."""
