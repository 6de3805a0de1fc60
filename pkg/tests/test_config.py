# Tests for configuration manager

import json
import logging
import tempfile
import pytest
from fractions import Fraction
from pathlib import Path
from pydantic import ValidationError

from treesums.algebra import Q2
from treesums.config_manager import HISTORY_LIMIT, ResultStore, RunConfig, configure_logging
from treesums.coverings import LambdaPoint


class TestRunConfig:
    """Tests for the RunConfig model."""

    def test_default_values(self):
        """RunConfig should have sensible defaults."""
        config = RunConfig(command="moduli")
        assert config.max_n == 7
        assert config.strata is False
        assert config.d == 3
        assert config.order == 12
        assert config.p_x == "q^2+1"
        assert config.m == 1
        assert config.lambdas == []
        assert config.format == "pretty"
        assert config.output is None
        assert config.suite == "all"
        assert config.log_level == "INFO"
        assert config.history_dir is None

    def test_unknown_command(self):
        """Only the five commands are accepted."""
        with pytest.raises(ValidationError):
            RunConfig(command="scan")

    def test_p_x_is_normalized(self):
        """p_x is stored in canonical text form."""
        config = RunConfig(command="config", p_x="1 + q^2 + q^4")
        assert config.p_x == "q^4+q^2+1"
        assert config.polynomial == Q2 * Q2 + Q2 + 1

    def test_p_x_invalid(self):
        """Unparseable polynomials are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="config", p_x="q**2")

    def test_p_x_zero(self):
        """The zero polynomial is not a Poincaré polynomial."""
        with pytest.raises(ValidationError):
            RunConfig(command="config", p_x="0")

    def test_m_positive(self):
        """m should reject 0."""
        with pytest.raises(ValidationError):
            RunConfig(command="config", m=0)

    def test_lambdas(self):
        """Lambda points are validated and parsed."""
        config = RunConfig(command="coverings", lambdas=["2,3", "1/2,0"])
        assert config.lambda_points == [LambdaPoint(2, 3), LambdaPoint(Fraction(1, 2), 0)]

    def test_lambdas_invalid(self):
        """Malformed lambda points are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="coverings", lambdas=["2"])

    def test_format_validation(self):
        """Format should be json, csv or pretty."""
        for value in ["json", "csv", "pretty"]:
            assert RunConfig(command="euler", format=value).format == value
        with pytest.raises(ValidationError):
            RunConfig(command="euler", format="xml")

    def test_suite_case_insensitive(self):
        """Suite names are lowercased."""
        assert RunConfig(command="verify", suite="Trees").suite == "trees"

    def test_suite_invalid(self):
        """Unknown suites are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="verify", suite="everything")

    def test_log_level_validation_case_insensitive(self):
        """Log level should be case-insensitive."""
        config = RunConfig(command="moduli", log_level='debug')
        assert config.log_level == 'DEBUG'

    def test_log_level_validation_invalid(self):
        """Log level should reject invalid values."""
        with pytest.raises(ValidationError):
            RunConfig(command="moduli", log_level='INVALID')

    def test_max_n_range(self):
        """max_n should accept 1-500."""
        assert RunConfig(command="euler", max_n=500).max_n == 500
        with pytest.raises(ValidationError):
            RunConfig(command="euler", max_n=0)
        with pytest.raises(ValidationError):
            RunConfig(command="euler", max_n=501)

    def test_strata_budget(self):
        """Strata oracles stop at n = 8."""
        assert RunConfig(command="moduli", strata=True, max_n=8).strata is True
        with pytest.raises(ValidationError):
            RunConfig(command="moduli", strata=True, max_n=9)

    def test_nest_budget(self):
        """Nest strata stop at n = 6."""
        with pytest.raises(ValidationError):
            RunConfig(command="config", strata=True, max_n=7)

    def test_covering_budget(self):
        """Full covering sums stop at d = 4, star sums at 60."""
        assert RunConfig(command="coverings", d=4).d == 4
        with pytest.raises(ValidationError):
            RunConfig(command="coverings", d=5)
        assert RunConfig(command="coverings", d=60, stars=True).d == 60
        with pytest.raises(ValidationError):
            RunConfig(command="coverings", d=61, stars=True)


class TestResultStore:
    """Tests for the ResultStore class."""

    @pytest.fixture
    def temp_history_dir(self):
        """Create a temporary history directory."""
        with tempfile.TemporaryDirectory() as tmpdir:
            yield tmpdir

    @pytest.fixture
    def store(self, temp_history_dir):
        """Create a ResultStore with temporary directory."""
        return ResultStore(history_dir=temp_history_dir)

    def test_init_creates_directories(self, temp_history_dir):
        """ResultStore should create history and logs directories."""
        nested = Path(temp_history_dir) / "runs"
        ResultStore(history_dir=str(nested))
        assert nested.exists()
        assert (nested / "logs").exists()

    def test_disabled_store(self):
        """Without a directory nothing is written."""
        store = ResultStore()
        assert store.enabled is False
        assert store.get_log_file() is None
        assert store.get_history_file() is None
        store.save_run({"suite": "trees"})
        assert store.load_run_history() == []

    def test_get_log_file(self, store, temp_history_dir):
        """get_log_file should return correct path."""
        assert store.get_log_file() == Path(temp_history_dir) / "logs" / "treesums.log"

    def test_save_and_load_history(self, store):
        """Newest run comes first."""
        store.save_run({"suite": "trees"})
        store.save_run({"suite": "moduli"})
        history = store.load_run_history()
        assert [record["suite"] for record in history] == ["moduli", "trees"]

    def test_history_limit(self, store):
        """History keeps the most recent runs only."""
        for i in range(HISTORY_LIMIT + 5):
            store.save_run({"index": i})
        history = store.load_run_history()
        assert len(history) == HISTORY_LIMIT
        assert history[0]["index"] == HISTORY_LIMIT + 4

    def test_corrupt_history(self, store):
        """Corrupt or non-list history reads as empty."""
        store.get_history_file().write_text("{not json")
        assert store.load_run_history() == []
        store.get_history_file().write_text(json.dumps({"suite": "trees"}))
        assert store.load_run_history() == []

    def test_clear_run_history(self, store):
        """clear_run_history should delete the history file."""
        store.save_run({"suite": "trees"})
        store.clear_run_history()
        assert store.load_run_history() == []


class TestConfigureLogging:
    """Tests for logging setup."""

    def test_file_handler(self):
        """Records reach the log file in the configured format."""
        with tempfile.TemporaryDirectory() as tmpdir:
            log_file = Path(tmpdir) / "treesums.log"
            configure_logging("INFO", log_file)
            logging.getLogger("treesums.test").info("hello")
            logging.getLogger("treesums.test").debug("hidden")
            for handler in logging.getLogger().handlers:
                handler.flush()
            content = log_file.read_text()
            configure_logging("INFO")
            assert "[INFO] treesums.test: hello" in content
            assert "hidden" not in content

    def test_level(self):
        """The root level follows the argument."""
        configure_logging("debug")
        assert logging.getLogger().level == logging.DEBUG
        configure_logging("INFO")
