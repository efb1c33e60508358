"""Persistence contracts for experiment outputs."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Protocol

from src.models.adaptation import AdaptationReport
from src.models.experiment import ResultRow


class ReportSink(Protocol):
    """Writes a result table to disk."""

    suffix: str

    def write(self, rows: Sequence[ResultRow], path: Path) -> Path:
        """Persist ``rows`` at ``path`` and return the written file."""


class AdaptationSink(Protocol):
    """Writes per-sample adaptation reports."""

    def write(self, reports: Iterable[AdaptationReport], path: Path) -> Path:
        """Persist one record per report and return the written file."""
