"""
BDD step definitions for baseline-only experiments.

Tests that comparing WMMSE and MRT needs no network and yields one row per
channel family, network size and method.
"""

from pathlib import Path

import pytest
from pytest_bdd import given, parsers, scenario, then, when

from fixtures.model_fixtures import make_spec
from src.harness import experiment
from src.harness.experiment import ExperimentResult, run_experiment
from src.harness.report import emit_report
from src.models.enums import Method, ReportFormat
from src.models.experiment import RESULT_COLUMNS, ExperimentSpec

# ---------------------------------------------------------------------------
# Scenario bindings
# ---------------------------------------------------------------------------

FEATURE = "../features/baseline_experiment.feature"


@scenario(FEATURE, "WMMSE and MRT over two sizes")
def test_baselines_over_two_sizes() -> None:
    """Experiment: baselines only, no training."""


@scenario(FEATURE, "Results land in a CSV table")
def test_results_csv() -> None:
    """Experiment: rows written with the fixed header."""


# ---------------------------------------------------------------------------
# Shared context holder
# ---------------------------------------------------------------------------


class ExperimentContext:
    """Mutable context shared between BDD steps within a single scenario."""

    def __init__(self) -> None:
        """Initialize with empty state."""
        self.spec: ExperimentSpec | None = None
        self.result: ExperimentResult | None = None
        self.table: Path | None = None
        self.train_calls: int = 0


@pytest.fixture
def ctx() -> ExperimentContext:
    """Provide a fresh ExperimentContext for each scenario."""
    return ExperimentContext()


def _sizes(text: str) -> tuple[tuple[int, int], ...]:
    sizes = []
    for item in text.split(" and "):
        q, _, i = item.partition("x")
        sizes.append((int(q), int(i)))
    return tuple(sizes)


# ---------------------------------------------------------------------------
# Given steps
# ---------------------------------------------------------------------------


@given(parsers.parse("a tiny experiment comparing wmmse and mrt at sizes {sizes}"))
def baseline_spec(ctx: ExperimentContext, sizes: str) -> None:
    """Three channel families, two samples per cell."""
    ctx.spec = make_spec(methods=(Method.WMMSE, Method.MRT), eval_sizes=_sizes(sizes))


# ---------------------------------------------------------------------------
# When steps
# ---------------------------------------------------------------------------


@when("the experiment runs")
def run(ctx: ExperimentContext, mocker) -> None:
    """Run the experiment while counting training calls."""
    assert ctx.spec is not None
    spy = mocker.spy(experiment, "train")
    ctx.result = run_experiment(ctx.spec)
    ctx.train_calls = spy.call_count


@when(parsers.parse("the rows are written as {fmt}"))
def write_rows(ctx: ExperimentContext, tmp_path: Path, fmt: str) -> None:
    """Emit the result table into a temporary directory."""
    assert ctx.result is not None
    ctx.table = emit_report(ctx.result.rows, tmp_path, ReportFormat(fmt))


# ---------------------------------------------------------------------------
# Then steps
# ---------------------------------------------------------------------------


@then("no network is trained")
def nothing_trained(ctx: ExperimentContext) -> None:
    """Assert no training happened and no network was returned."""
    assert ctx.result is not None
    assert ctx.train_calls == 0
    assert ctx.result.nets == {}


@then(parsers.parse("the result has {count:d} rows"))
def row_count(ctx: ExperimentContext, count: int) -> None:
    """Assert one row per family, size and method."""
    assert ctx.result is not None
    assert len(ctx.result.rows) == count


@then(parsers.parse("every row reports {samples:d} samples and a non-negative mean sum rate"))
def row_values(ctx: ExperimentContext, samples: int) -> None:
    """Assert per-row sample counts and rates."""
    assert ctx.result is not None
    assert all(r.sample_count == samples for r in ctx.result.rows)
    assert all(r.mean_sum_rate >= 0.0 for r in ctx.result.rows)


@then(parsers.parse("the table has {count:d} data lines under the result header"))
def table_lines(ctx: ExperimentContext, count: int) -> None:
    """Assert the CSV header and line count."""
    assert ctx.table is not None
    lines = ctx.table.read_text().splitlines()
    assert lines[0] == ",".join(RESULT_COLUMNS)
    assert len(lines) == count + 1
