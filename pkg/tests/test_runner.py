# Tests for suite runner

import tempfile
import pytest
from datetime import datetime
from unittest.mock import MagicMock, patch

from treesums.config_manager import MAX_STRATA_N, ResultStore
from treesums.partition import GradingError
from treesums.reports import SuiteReport, VerificationReport
from treesums.runner import (
    SUITE_FUNCTIONS,
    RunResult,
    RunnerState,
    SuiteOptions,
    SuiteRunner,
    trees_suite,
)


def _passing(options):
    return [VerificationReport(name="ok", passed=True)]


def _failing(options):
    return [
        VerificationReport(name="ok", passed=True),
        VerificationReport(name="broken", passed=False, first_mismatch=3),
    ]


def _raising(options):
    raise GradingError("infinitely many trees")


class TestRunResult:
    """Tests for the RunResult dataclass."""

    def test_duration_seconds(self):
        """duration_seconds should calculate time difference."""
        start = datetime(2024, 1, 1, 10, 0, 0)
        end = datetime(2024, 1, 1, 10, 0, 30)

        result = RunResult(
            success=True,
            suite="trees",
            report=SuiteReport(suite="trees"),
            error="",
            start_time=start,
            end_time=end,
        )

        assert result.duration_seconds == 30.0

    def test_duration_seconds_subsecond(self):
        """duration_seconds should handle subsecond precision."""
        start = datetime(2024, 1, 1, 10, 0, 0, 0)
        end = datetime(2024, 1, 1, 10, 0, 0, 500000)  # 0.5 seconds

        result = RunResult(
            success=False,
            suite="moduli",
            report=SuiteReport(suite="moduli"),
            error="",
            start_time=start,
            end_time=end,
        )

        assert result.duration_seconds == 0.5


class TestRunnerState:
    """Tests for the RunnerState dataclass."""

    def test_default_state(self):
        """Default state has no last run and no checks."""
        state = RunnerState()
        assert state.last_run is None
        assert state.current_suite == ""
        assert state.completed_checks == 0


class TestSuiteRunner:
    """Tests for the SuiteRunner class."""

    @pytest.fixture
    def temp_history_dir(self):
        """Create a temporary history directory."""
        with tempfile.TemporaryDirectory() as tmpdir:
            yield tmpdir

    @pytest.fixture
    def store(self, temp_history_dir):
        """Create a ResultStore with temporary directory."""
        return ResultStore(history_dir=temp_history_dir)

    @pytest.fixture
    def runner(self, store):
        """Create a SuiteRunner backed by the temporary store."""
        return SuiteRunner(store)

    def test_init(self, store):
        """SuiteRunner should initialize with correct state."""
        runner = SuiteRunner(store)
        assert runner.store == store
        assert runner.state.last_run is None

    def test_init_without_store(self):
        """A runner without a store keeps no history."""
        runner = SuiteRunner()
        assert runner.store.enabled is False

    def test_run_unknown_suite(self, runner):
        """Unknown suite names raise before anything runs."""
        with pytest.raises(ValueError):
            runner.run("everything")
        assert runner.state.last_run is None

    def test_run_trees_suite(self, runner):
        """The tree counting suite passes."""
        result = runner.run("trees")
        assert result.success is True
        assert result.error == ""
        assert len(result.report.reports) == len(trees_suite(SuiteOptions()))

    def test_moduli_suite_checks_every_strata_size(self, runner):
        """The moduli suite compares all routes up to the strata limit, n = 8 included."""
        result = runner.run("moduli", SuiteOptions(order=6, max_n=4))
        names = [r.name for r in result.report.reports if "strata = recursion" in r.name]
        assert [name.split(":")[0] for name in names] == [f"moduli n={n}" for n in range(3, MAX_STRATA_N + 1)]
        assert result.success is True

    def test_run_reports_failures(self, runner):
        """A failing check makes the run unsuccessful."""
        with patch.dict(SUITE_FUNCTIONS, {"trees": _failing}):
            result = runner.run("trees")
        assert result.success is False
        assert result.error == ""
        assert [r.name for r in result.report.failures] == ["broken"]

    def test_run_catches_library_errors(self, runner):
        """Library errors end the run with an error message."""
        with patch.dict(SUITE_FUNCTIONS, {"engine": _raising}):
            result = runner.run("engine")
        assert result.success is False
        assert result.error == "GradingError: infinitely many trees"

    def test_run_all_runs_every_suite(self, runner):
        """The all suite runs every registered suite in order."""
        replacements = {name: _passing for name in SUITE_FUNCTIONS}
        with patch.dict(SUITE_FUNCTIONS, replacements):
            result = runner.run("all")
        assert result.success is True
        assert len(result.report.reports) == len(replacements)

    def test_run_passes_options(self, runner):
        """Suite functions receive the options."""
        suite = MagicMock(return_value=[])
        options = SuiteOptions(order=5, max_n=4)
        with patch.dict(SUITE_FUNCTIONS, {"moduli": suite}):
            runner.run("moduli", options)
        suite.assert_called_once_with(options)

    def test_run_on_report_callback(self, runner):
        """on_report should be called once per check."""
        received = []
        with patch.dict(SUITE_FUNCTIONS, {"trees": _failing}):
            runner.run("trees", on_report=received.append)
        assert [r.name for r in received] == ["ok", "broken"]

    def test_run_updates_state_after_completion(self, runner):
        """State should record the last run and clear the current suite."""
        with patch.dict(SUITE_FUNCTIONS, {"trees": _failing}):
            runner.run("trees")
        assert runner.state.completed_checks == 2
        assert runner.state.last_run.suite == "trees"
        assert len(runner.state.last_run.report.failures) == 1
        assert runner.state.current_suite == ""

    def test_run_saves_to_history(self, runner, store):
        """Each run is recorded in the history file."""
        with patch.dict(SUITE_FUNCTIONS, {"trees": _failing}):
            runner.run("trees")
        history = store.load_run_history()
        assert len(history) == 1
        record = history[0]
        assert record['suite'] == "trees"
        assert record['success'] is False
        assert record['checks'] == 2
        assert record['failures'] == ["broken"]
        assert record['error'] == ""
