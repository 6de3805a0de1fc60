# Tests for the command line interface

import json
import tempfile
import pytest
from pathlib import Path
from unittest.mock import patch

from treesums.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, parse_config
from treesums.partition import GradingError
from treesums.reports import VerificationReport
from treesums.runner import SUITE_FUNCTIONS


def _failing(options):
    return [VerificationReport(name="broken", passed=False)]


def _raising(options):
    raise GradingError("infinitely many trees")


@pytest.fixture
def temp_dir():
    """Create a temporary directory for output and history."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


class TestParseConfig:
    """Tests for argument parsing."""

    def test_defaults(self):
        """Unset options fall back to the model defaults."""
        config = parse_config(["config"])
        assert config.command == "config"
        assert config.max_n == 5
        assert config.p_x == "q^2+1"

    def test_repeated_lambda(self):
        """--lambda may be given several times."""
        config = parse_config(["coverings", "--lambda", "2,3", "--lambda", "1,0"])
        assert config.lambdas == ["2,3", "1,0"]


class TestModuliCommand:
    """Tests for the moduli and euler commands."""

    def test_csv(self, capsys):
        """CSV rows carry P(q) and χ."""
        assert main(["moduli", "--format", "csv", "--max-n", "7"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "n,poincare,euler"
        assert "7,q^8+42*q^6+127*q^4+42*q^2+1,213" in out.splitlines()

    def test_strata_cross_check(self, capsys):
        """--strata checks every row against the strata sum."""
        assert main(["moduli", "--strata", "--max-n", "6"]) == EXIT_OK

    def test_strata_budget(self, capsys):
        """Strata beyond n = 8 are a usage error."""
        assert main(["moduli", "--strata", "--max-n", "9"]) == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_json(self, capsys):
        """JSON output is a moduli table."""
        assert main(["moduli", "--format", "json", "--max-n", "4"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "moduli"
        assert [row["n"] for row in data["rows"]] == [3, 4]

    def test_euler_csv(self, capsys):
        """Euler numbers for n = 3..7."""
        assert main(["euler", "--format", "csv", "--max-n", "7"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,euler"
        assert lines[-1] == "7,213"
        assert len(lines) == 6


class TestConfigCommand:
    """Tests for the config command."""

    def test_json(self, capsys):
        """Two points on the projective line."""
        assert main(["config", "--format", "json", "--max-n", "3"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "configuration"
        assert data["rows"][1]["poincare"] == "q^4+2*q^2+1"
        assert data["rows"][1]["euler"] == "4"

    def test_surface_with_strata(self, capsys):
        """Nest strata agree for a surface."""
        assert main(["config", "--p-x", "q^4+q^2+1", "--m", "2", "--max-n", "4", "--strata"]) == EXIT_OK
        assert "m=2" in capsys.readouterr().out

    def test_bad_polynomial(self, capsys):
        """An unparseable P_X is a usage error."""
        assert main(["config", "--p-x", "q**2"]) == EXIT_USAGE


class TestCoveringsCommand:
    """Tests for the coverings command."""

    def test_pretty(self, capsys):
        """m_1 = 1 at a single point."""
        assert main(["coverings", "--d", "1", "--lambda", "2,3"]) == EXIT_OK
        assert capsys.readouterr().out == "m_1 = 1 at lambda=(2,3); d^-3 = 1: match\n"

    def test_csv_default_points(self, capsys):
        """Every shipped point gives 1/8 for d = 2."""
        assert main(["coverings", "--d", "2", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "d,lambda,m_d,expected,matches"
        assert lines[1] == '2,"1,0",1/8,1/8,true'
        assert all(line.endswith("true") for line in lines[1:])

    def test_degree_budget(self, capsys):
        """d = 5 needs --stars."""
        assert main(["coverings", "--d", "5"]) == EXIT_USAGE

    def test_equal_lambdas(self, capsys):
        """λ1 = λ2 is a usage error for d >= 2."""
        assert main(["coverings", "--d", "2", "--lambda", "1,1"]) == EXIT_USAGE
        assert "lambda" in capsys.readouterr().err

    def test_stars(self, capsys):
        """The star sweep reports the cancellation split."""
        assert main(["coverings", "--stars", "--d", "4", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "d,total,trivial_term,remainder,odd_sum,even_sum,matches"
        assert lines[-1] == "4,1,-1,2,-16,18,true"


class TestVerifyCommand:
    """Tests for the verify command."""

    def test_trees_suite(self, capsys):
        """The tree suite passes."""
        assert main(["verify", "--suite", "trees"]) == EXIT_OK
        assert "0 failed" in capsys.readouterr().out

    def test_failing_suite(self, capsys):
        """A failed check exits with 1."""
        with patch.dict(SUITE_FUNCTIONS, {"trees": _failing}):
            assert main(["verify", "--suite", "trees"]) == EXIT_FAILED
        assert "[FAIL] broken" in capsys.readouterr().out

    def test_erroring_suite(self, capsys):
        """A library error exits with 2."""
        with patch.dict(SUITE_FUNCTIONS, {"engine": _raising}):
            assert main(["verify", "--suite", "engine"]) == EXIT_USAGE
        assert "ERROR: GradingError" in capsys.readouterr().out

    def test_json_and_history(self, capsys, temp_dir):
        """JSON report plus a history record and a log file."""
        code = main(["verify", "--suite", "trees", "--format", "json", "--history-dir", temp_dir])
        assert code == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["suite"] == "trees"
        assert data["passed"] is True
        history = json.loads((Path(temp_dir) / "run_history.json").read_text())
        assert history[0]["suite"] == "trees"
        assert (Path(temp_dir) / "logs" / "treesums.log").exists()


class TestMain:
    """Tests for output routing and usage errors."""

    def test_output_file(self, capsys, temp_dir):
        """--output writes the file instead of stdout."""
        target = Path(temp_dir) / "euler.csv"
        assert main(["euler", "--format", "csv", "--max-n", "5", "--output", str(target)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert target.read_text() == "n,euler\n3,1\n4,2\n5,7\n"

    def test_unknown_command(self, capsys):
        """argparse usage errors exit with 2."""
        assert main(["scan"]) == EXIT_USAGE

    def test_missing_command(self, capsys):
        """A subcommand is required."""
        assert main([]) == EXIT_USAGE

    def test_version(self, capsys):
        """--version prints and exits cleanly."""
        assert main(["--version"]) == EXIT_OK
        assert "treesums" in capsys.readouterr().out
