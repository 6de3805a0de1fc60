# Verification Reports
# Pass/fail records produced by every check, and helpers that build them

import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from treesums.algebra import QPolynomial, TruncatedSeries

logger = logging.getLogger(__name__)


class VerificationReport(BaseModel):
    """Outcome of one check."""
    name: str
    description: str = ""
    passed: bool
    order: Optional[int] = None
    first_mismatch: Optional[int] = None
    details: Dict[str, Any] = Field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"[{status}] {self.name}"
        if self.order is not None:
            line += f" (order {self.order})"
        if self.first_mismatch is not None:
            line += f": first mismatch at t^{self.first_mismatch}"
        return line


class SuiteReport(BaseModel):
    """All reports of one suite run."""
    suite: str
    reports: List[VerificationReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def failures(self) -> List[VerificationReport]:
        return [r for r in self.reports if not r.passed]

    def extend(self, reports: List[VerificationReport]) -> None:
        self.reports.extend(reports)


def _render(value) -> str:
    if isinstance(value, QPolynomial):
        return value.to_string()
    return str(value)


def compare_series(name: str, left: TruncatedSeries, right: TruncatedSeries,
                   description: str = "", order: Optional[int] = None) -> VerificationReport:
    """Coefficient-wise equality up to ``order`` (default: the smaller order)."""
    if order is None:
        order = min(left.order, right.order)
    mismatch = None
    for n in range(order + 1):
        if left.coefficient(n) != right.coefficient(n):
            mismatch = n
            break
    details = {}
    if mismatch is not None:
        details = {
            "left": _render(left.coefficient(mismatch)),
            "right": _render(right.coefficient(mismatch)),
        }
        logger.error(f"{name}: mismatch at t^{mismatch}")
    return VerificationReport(
        name=name,
        description=description,
        passed=mismatch is None,
        order=order,
        first_mismatch=mismatch,
        details=details,
    )


def zero_residual(name: str, residual: TruncatedSeries, description: str = "") -> VerificationReport:
    """A residual series must vanish through its order."""
    mismatch = residual.first_nonzero()
    details = {}
    if mismatch is not None:
        details = {"residual": _render(residual.coefficient(mismatch))}
        logger.error(f"{name}: residual nonzero at t^{mismatch}")
    return VerificationReport(
        name=name,
        description=description,
        passed=mismatch is None,
        order=residual.order,
        first_mismatch=mismatch,
        details=details,
    )


def compare_values(name: str, left, right, description: str = "",
                   details: Optional[Dict[str, Any]] = None) -> VerificationReport:
    """Exact equality of two scalars or polynomials."""
    passed = left == right
    data = dict(details or {})
    data.update({"left": _render(left), "right": _render(right)})
    if not passed:
        logger.error(f"{name}: {_render(left)} != {_render(right)}")
    return VerificationReport(name=name, description=description, passed=passed, details=data)
