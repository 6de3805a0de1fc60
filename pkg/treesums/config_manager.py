# Configuration Manager
# Validated run options, run history storage, and logging setup

import json
import logging
import sys
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from treesums.algebra import QPolynomial
from treesums.coverings import MAX_FULL_DEGREE, MAX_STAR_DEGREE, LambdaPoint

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] %(name)s: %(message)s"

MAX_STRATA_N = 8
MAX_NEST_N = 6
MAX_RECURSION_N = 500
HISTORY_LIMIT = 100

SUITES = ("algebra", "trees", "engine", "moduli", "config", "coverings", "all")


class RunConfig(BaseModel):
    """Run options, one field per command-line flag."""
    command: Literal["moduli", "euler", "config", "coverings", "verify"]
    max_n: int = Field(default=7, ge=1, le=MAX_RECURSION_N)
    strata: bool = Field(default=False)
    d: int = Field(default=3, ge=1, le=MAX_STAR_DEGREE)
    stars: bool = Field(default=False)
    order: int = Field(default=12, ge=1, le=40)
    p_x: str = Field(default="q^2+1")
    m: int = Field(default=1, ge=1)
    lambdas: List[str] = Field(default_factory=list)
    format: Literal["json", "csv", "pretty"] = Field(default="pretty")
    output: Optional[str] = Field(default=None)
    suite: str = Field(default="all")
    log_level: str = Field(default="INFO")
    history_dir: Optional[str] = Field(default=None)

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        allowed = ['DEBUG', 'INFO', 'ERROR']
        if v.upper() not in allowed:
            raise ValueError(f'log_level must be one of {allowed}')
        return v.upper()

    @field_validator('suite')
    @classmethod
    def validate_suite(cls, v: str) -> str:
        if v.lower() not in SUITES:
            raise ValueError(f'suite must be one of {list(SUITES)}')
        return v.lower()

    @field_validator('p_x')
    @classmethod
    def validate_p_x(cls, v: str) -> str:
        poly = QPolynomial.parse(v)
        if poly.is_zero():
            raise ValueError('p_x must be a nonzero polynomial')
        return poly.to_string()

    @field_validator('lambdas')
    @classmethod
    def validate_lambdas(cls, v: List[str]) -> List[str]:
        for text in v:
            LambdaPoint.parse(text)
        return v

    @model_validator(mode='after')
    def validate_budgets(self) -> "RunConfig":
        if self.strata and self.max_n > MAX_STRATA_N:
            raise ValueError(f'strata oracles are limited to max_n <= {MAX_STRATA_N}')
        if self.command == "config" and self.strata and self.max_n > MAX_NEST_N:
            raise ValueError(f'nest strata are limited to max_n <= {MAX_NEST_N}')
        if self.command == "coverings" and not self.stars and self.d > MAX_FULL_DEGREE:
            raise ValueError(f'full covering sums are limited to d <= {MAX_FULL_DEGREE}')
        return self

    @property
    def polynomial(self) -> QPolynomial:
        return QPolynomial.parse(self.p_x)

    @property
    def lambda_points(self) -> List[LambdaPoint]:
        return [LambdaPoint.parse(text) for text in self.lambdas]


class ResultStore:
    """Run history and log file under an optional directory."""

    def __init__(self, history_dir: Optional[str] = None):
        self.history_dir = Path(history_dir) if history_dir else None
        self.logs_dir = self.history_dir / "logs" if self.history_dir else None
        self._ensure_directories()

    @property
    def enabled(self) -> bool:
        return self.history_dir is not None

    def _ensure_directories(self) -> None:
        """Create history and logs directories if they don't exist."""
        if not self.enabled:
            return
        self.history_dir.mkdir(parents=True, exist_ok=True)
        self.logs_dir.mkdir(parents=True, exist_ok=True)

    def get_log_file(self) -> Optional[Path]:
        """Get path to the main log file."""
        if not self.enabled:
            return None
        return self.logs_dir / "treesums.log"

    # Run history
    def get_history_file(self) -> Optional[Path]:
        if not self.enabled:
            return None
        return self.history_dir / "run_history.json"

    def save_run(self, run_record: dict) -> None:
        """Prepend a run record to history."""
        if not self.enabled:
            return
        history = self.load_run_history()
        history.insert(0, run_record)
        history = history[:HISTORY_LIMIT]
        with open(self.get_history_file(), 'w') as f:
            json.dump(history, f, indent=2)

    def load_run_history(self) -> List[dict]:
        history_file = self.get_history_file()
        if history_file is None or not history_file.exists():
            return []
        try:
            with open(history_file, 'r') as f:
                data = json.load(f)
        except (json.JSONDecodeError, ValueError):
            return []
        return data if isinstance(data, list) else []

    def clear_run_history(self) -> None:
        history_file = self.get_history_file()
        if history_file is not None and history_file.exists():
            history_file.unlink()


def configure_logging(level: str = "INFO", log_file: Optional[Path] = None) -> None:
    """Route every module logger to stderr and, optionally, a log file."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, handlers=handlers, force=True)
