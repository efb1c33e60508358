"""
Result emission.

Tables go out as CSV with a fixed header or as a JSON array of rows;
adaptation reports go out as JSON lines, one sample per line.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import pandas as pd
import structlog
from pydantic import TypeAdapter

from src.core.errors import PersistenceError
from src.core.persistence import AdaptationSink, ReportSink
from src.models.adaptation import AdaptationReport
from src.models.enums import ReportFormat
from src.models.experiment import RESULT_COLUMNS, ResultRow, TimingStats

logger = structlog.get_logger(__name__)

_ROWS = TypeAdapter(list[ResultRow])
_TIMINGS = TypeAdapter(list[TimingStats])


class CsvReportSink:
    """Comma-separated table in ``RESULT_COLUMNS`` order."""

    suffix = ".csv"

    def write(self, rows: Sequence[ResultRow], path: Path) -> Path:
        frame = pd.DataFrame(
            [row.model_dump(mode="json") for row in rows], columns=list(RESULT_COLUMNS)
        )
        frame["oau_iterations"] = frame["oau_iterations"].astype("Int64")
        frame.to_csv(path, index=False)
        return path


class JsonReportSink:
    """JSON array of result rows."""

    suffix = ".json"

    def write(self, rows: Sequence[ResultRow], path: Path) -> Path:
        path.write_bytes(_ROWS.dump_json(list(rows), indent=2))
        return path


class JsonlAdaptationSink:
    """One adaptation report per line."""

    def write(self, reports: Iterable[AdaptationReport], path: Path) -> Path:
        with path.open("w", encoding="utf-8") as handle:
            for report in reports:
                handle.write(report.model_dump_json() + "\n")
        return path


SINKS: dict[ReportFormat, ReportSink] = {
    ReportFormat.CSV: CsvReportSink(),
    ReportFormat.JSON: JsonReportSink(),
}


def emit_report(
    rows: Sequence[ResultRow], out: Path, fmt: ReportFormat = ReportFormat.CSV
) -> Path:
    """Write ``rows`` to ``out`` (a file, or a directory receiving ``results.<ext>``).

    Raises:
        ValueError: If ``rows`` is empty.
        PersistenceError: If the file cannot be written.
    """
    if not rows:
        raise ValueError("report needs at least one row")
    sink = SINKS[fmt]
    path = out / f"results{sink.suffix}" if out.is_dir() or not out.suffix else out
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        written = sink.write(rows, path)
    except OSError as exc:
        raise PersistenceError(f"cannot write report {path}: {exc}") from exc
    logger.info("report_written", path=str(written), rows=len(rows), format=str(fmt))
    return written


def read_json_report(path: Path) -> list[ResultRow]:
    """Parse a JSON report back into rows."""
    try:
        return _ROWS.validate_json(path.read_bytes())
    except OSError as exc:
        raise PersistenceError(f"cannot read report {path}: {exc}") from exc


def emit_adaptation(
    reports: Iterable[AdaptationReport], path: Path, sink: AdaptationSink | None = None
) -> Path:
    """Write adaptation reports as JSON lines."""
    sink = sink or JsonlAdaptationSink()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return sink.write(reports, path)
    except OSError as exc:
        raise PersistenceError(f"cannot write adaptation log {path}: {exc}") from exc


def emit_timings(stats: Sequence[TimingStats], path: Path) -> Path:
    """Write benchmark statistics as a JSON array."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(_TIMINGS.dump_json(list(stats), indent=2))
    except OSError as exc:
        raise PersistenceError(f"cannot write timings {path}: {exc}") from exc
    return path
