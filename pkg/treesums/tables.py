# Result Tables
# Moduli and configuration-space tables with JSON, CSV and plain-text codecs

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional

from treesums.algebra import QPolynomial


def _fraction_text(value: Fraction) -> str:
    return str(Fraction(value))


@dataclass(frozen=True)
class ModuliRow:
    """One moduli space: P(q), Euler characteristic and P/n!."""
    n: int
    poincare: QPolynomial
    euler: int

    @property
    def p(self) -> QPolynomial:
        """P/n!, the coefficient of t^n in the generating function."""
        return self.poincare * Fraction(1, factorial(self.n))


@dataclass(frozen=True)
class ModuliTable:
    rows: List[ModuliRow] = field(default_factory=list)

    CSV_HEADER = ["n", "poincare", "euler"]

    def to_json(self) -> dict:
        return {
            "kind": "moduli",
            "rows": [
                {
                    "n": row.n,
                    "poincare": row.poincare.to_string(),
                    "coeffs": row.poincare.to_json(),
                    "euler": str(row.euler),
                    "p": row.p.to_json(),
                }
                for row in self.rows
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModuliTable":
        if data.get("kind") != "moduli":
            raise ValueError("not a moduli table")
        return cls([
            ModuliRow(int(r["n"]), QPolynomial.from_json(r["coeffs"]), int(r["euler"]))
            for r in data["rows"]
        ])

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for row in self.rows:
            writer.writerow([row.n, row.poincare.to_string(), row.euler])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ModuliTable":
        reader = csv.DictReader(io.StringIO(text), skipinitialspace=True)
        return cls([
            ModuliRow(int(r["n"]), QPolynomial.parse(r["poincare"]), int(r["euler"]))
            for r in reader
        ])

    def to_pretty(self) -> str:
        width = max([len(r.poincare.to_string()) for r in self.rows] + [8])
        lines = [f"{'n':>3}  {'P(q)':<{width}}  chi"]
        for row in self.rows:
            lines.append(f"{row.n:>3}  {row.poincare.to_string():<{width}}  {row.euler}")
        return "\n".join(lines) + "\n"

    def row(self, n: int) -> Optional[ModuliRow]:
        return next((r for r in self.rows if r.n == n), None)


@dataclass(frozen=True)
class ConfigRow:
    """One configuration space X[n]: P(q) and Euler characteristic."""
    n: int
    poincare: QPolynomial
    euler: Fraction


@dataclass(frozen=True)
class ConfigTable:
    m: int
    p_x: QPolynomial
    rows: List[ConfigRow] = field(default_factory=list)

    CSV_HEADER = ["n", "poincare", "euler"]

    def to_json(self) -> dict:
        return {
            "kind": "configuration",
            "m": self.m,
            "p_x": self.p_x.to_string(),
            "rows": [
                {
                    "n": row.n,
                    "poincare": row.poincare.to_string(),
                    "coeffs": row.poincare.to_json(),
                    "euler": _fraction_text(row.euler),
                }
                for row in self.rows
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConfigTable":
        if data.get("kind") != "configuration":
            raise ValueError("not a configuration table")
        return cls(
            int(data["m"]),
            QPolynomial.parse(data["p_x"]),
            [
                ConfigRow(int(r["n"]), QPolynomial.from_json(r["coeffs"]), Fraction(r["euler"]))
                for r in data["rows"]
            ],
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for row in self.rows:
            writer.writerow([row.n, row.poincare.to_string(), _fraction_text(row.euler)])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str, m: int, p_x: QPolynomial) -> "ConfigTable":
        reader = csv.DictReader(io.StringIO(text), skipinitialspace=True)
        return cls(m, p_x, [
            ConfigRow(int(r["n"]), QPolynomial.parse(r["poincare"]), Fraction(r["euler"]))
            for r in reader
        ])

    def to_pretty(self) -> str:
        header = f"X[n] for m={self.m}, P_X={self.p_x.to_string()}"
        lines = [header]
        for row in self.rows:
            lines.append(f"{row.n:>3}  {row.poincare.to_string()}  chi={_fraction_text(row.euler)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EulerTable:
    """χ(M̄_{0,n}) for n = 3..max_n, exact integers."""
    values: Dict[int, int] = field(default_factory=dict)

    CSV_HEADER = ["n", "euler"]

    def to_json(self) -> dict:
        return {
            "kind": "euler",
            "rows": [{"n": n, "euler": str(value)} for n, value in sorted(self.values.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EulerTable":
        if data.get("kind") != "euler":
            raise ValueError("not an Euler table")
        return cls({int(r["n"]): int(r["euler"]) for r in data["rows"]})

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for n, value in sorted(self.values.items()):
            writer.writerow([n, value])
        return buffer.getvalue()

    def to_pretty(self) -> str:
        return "".join(f"{n:>3}  {value}\n" for n, value in sorted(self.values.items()))


def dump_json(data: dict) -> str:
    """Stable JSON text for tables and reports."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
