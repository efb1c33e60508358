"""Timing abstractions.

Provides a small clock interface so benchmarks measure real wall time while
tests can drive time by hand.
"""

from __future__ import annotations

import time
from datetime import UTC, datetime, timedelta
from typing import Protocol


class Clock(Protocol):
    """Abstract time source used by benchmarks and adaptation reports."""

    def now(self) -> datetime:
        """Return current timestamp in UTC."""

    def monotonic(self) -> float:
        """Return monotonic clock value in seconds."""


class PerfCounterClock:
    """Clock backed by the high-resolution performance counter."""

    def now(self) -> datetime:
        return datetime.now(UTC)

    def monotonic(self) -> float:
        return time.perf_counter()


class ManualClock:
    """Deterministic clock for tests with manual time advancement."""

    def __init__(self, start_at: datetime | None = None, tick: float = 0.0) -> None:
        """Initialize the clock.

        Args:
            start_at: Wall-clock start; defaults to now.
            tick: Seconds added automatically on every ``monotonic()`` read.
        """
        self._now = start_at or datetime.now(UTC)
        self._mono = 0.0
        self._tick = tick

    def now(self) -> datetime:
        return self._now

    def monotonic(self) -> float:
        value = self._mono
        if self._tick:
            self.advance(self._tick)
        return value

    def advance(self, seconds: float) -> None:
        """Advance clock time."""
        if seconds < 0:
            raise ValueError("Cannot advance clock by negative duration")
        self._mono += seconds
        self._now = self._now + timedelta(seconds=seconds)
