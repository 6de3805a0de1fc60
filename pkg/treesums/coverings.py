# Multiple Coverings
# Tree-sum evaluation of the degree-d multiple-cover contribution m_d and the
# partition identity behind its star reduction

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterator, List, Sequence, Tuple

from treesums.algebra import TreeSumsError, TruncatedSeries
from treesums.reports import VerificationReport, compare_series, compare_values
from treesums.trees import CoveringTree, EnumerationBudgetExceeded, enumerate_covering_trees

logger = logging.getLogger(__name__)

MAX_FULL_DEGREE = 4
MAX_STAR_DEGREE = 60


class LambdaError(TreeSumsError, ValueError):
    """λ1 = λ2 leaves the prefactor (λ1-λ2)^(2-2d) undefined for d >= 2."""


class SignConvention(str, Enum):
    """FLAGS: (-1)^(d + flags at colour-2 vertices). VERTICES: (-1)^(d + colour-2 vertices)."""
    FLAGS = "flags"
    VERTICES = "vertices"


@dataclass(frozen=True)
class LambdaPoint:
    lambda1: Fraction
    lambda2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lambda1", Fraction(self.lambda1))
        object.__setattr__(self, "lambda2", Fraction(self.lambda2))

    @classmethod
    def parse(cls, text: str) -> "LambdaPoint":
        """Read "a,b" with a and b integers or fractions like 1/2."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected two comma-separated rationals, got {text!r}")
        try:
            return cls(Fraction(parts[0]), Fraction(parts[1]))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"invalid lambda point {text!r}: {e}") from e

    def scaled(self, c) -> "LambdaPoint":
        return LambdaPoint(self.lambda1 * c, self.lambda2 * c)

    def __str__(self) -> str:
        return f"({self.lambda1}, {self.lambda2})"


SHIPPED_LAMBDAS = (
    LambdaPoint(1, 0),
    LambdaPoint(2, 3),
    LambdaPoint(2, -1),
    LambdaPoint(5, 1),
)


@dataclass(frozen=True)
class PartitionMultiplicities:
    """A partition of d as multiplicities r_i, with Σ i·r_i = d."""
    r: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(i < 1 or k < 1 for i, k in self.r.items()):
            raise ValueError("parts and multiplicities must be positive")

    @property
    def degree(self) -> int:
        return sum(i * k for i, k in self.r.items())

    @property
    def summands(self) -> int:
        return sum(self.r.values())

    @property
    def trivial(self) -> bool:
        """The one-part partition r_d = 1."""
        return len(self.r) == 1 and self.summands == 1

    def term(self) -> Fraction:
        """(1/Π r_i!)·Π (-d/i)^{r_i}."""
        d = self.degree
        value = Fraction(1)
        for i, k in self.r.items():
            value *= Fraction(-d, i) ** k / factorial(k)
        return value


def partitions(d: int) -> Iterator[PartitionMultiplicities]:
    """All partitions of d, largest parts first."""
    if d < 1:
        raise ValueError("d must be positive")

    def parts(remaining: int, largest: int) -> Iterator[List[int]]:
        if remaining == 0:
            yield []
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - part, part):
                yield [part] + rest

    for parts_list in parts(d, d):
        counts: Dict[int, int] = {}
        for part in parts_list:
            counts[part] = counts.get(part, 0) + 1
        yield PartitionMultiplicities(counts)


# --- tree terms ---

def vertex_factor(tree: CoveringTree) -> Fraction:
    """V = Π σ_v^{|v|-3}."""
    value = Fraction(1)
    for v in range(tree.tree.vertex_count):
        value *= Fraction(tree.sigma(v)) ** (tree.tree.valency(v) - 3)
    return value


def edge_factor(tree: CoveringTree, point: LambdaPoint) -> Fraction:
    """E = Π_α d_α³/d_α!² · Π_{a+b=d_α, a,b>=1} (aλ1 + bλ2)²."""
    value = Fraction(1)
    for degree in tree.degrees:
        value *= Fraction(degree ** 3, factorial(degree) ** 2)
        for a in range(1, degree):
            value *= (a * point.lambda1 + (degree - a) * point.lambda2) ** 2
    return value


def sign(tree: CoveringTree, convention: SignConvention = SignConvention.FLAGS) -> int:
    if convention is SignConvention.FLAGS:
        exponent = tree.flag_count(2)
    else:
        exponent = tree.color2_count
    return -1 if (tree.total_degree + exponent) % 2 else 1


@dataclass(frozen=True)
class CoveringTerm:
    tree: CoveringTree
    aut: int
    sign: int
    value: Fraction

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "aut": self.aut,
            "sign": self.sign,
            "value": str(self.value),
        }


def covering_terms(d: int, point: LambdaPoint,
                   convention: SignConvention = SignConvention.FLAGS) -> List[CoveringTerm]:
    """Every decorated tree of degree d with its signed, λ-weighted term."""
    if d > MAX_FULL_DEGREE:
        raise EnumerationBudgetExceeded(f"full covering sums are capped at d = {MAX_FULL_DEGREE}")
    terms = []
    for tree in enumerate_covering_trees(d):
        aut = tree.aut_order()
        s = sign(tree, convention)
        value = (
            Fraction(s, aut)
            * point.lambda1 ** (2 * tree.w(1))
            * point.lambda2 ** (2 * tree.w(2))
            * vertex_factor(tree)
            * edge_factor(tree, point)
        )
        terms.append(CoveringTerm(tree, aut, s, value))
    return terms


def prefactor(d: int, point: LambdaPoint) -> Fraction:
    """(λ1 - λ2)^{2-2d}."""
    if d == 1:
        return Fraction(1)
    gap = point.lambda1 - point.lambda2
    if gap == 0:
        raise LambdaError(f"lambda1 = lambda2 = {point.lambda1} with d = {d}")
    return gap ** (2 - 2 * d)


def m_d_full(d: int, point: LambdaPoint,
             convention: SignConvention = SignConvention.FLAGS) -> Fraction:
    if d < 1:
        raise ValueError("d must be positive")
    factor = prefactor(d, point)
    terms = covering_terms(d, point, convention)
    total = sum((term.value for term in terms), Fraction(0))
    logger.info(f"m_{d} at lambda={point}: {len(terms)} trees, value {total * factor}")
    return total * factor


# --- star reduction ---

def star_reduction_sum(d: int) -> Fraction:
    """Σ over partitions of d of (1/Π r_i!)·Π (-d/i)^{r_i}."""
    if d > MAX_STAR_DEGREE:
        raise EnumerationBudgetExceeded(f"star sums are capped at d = {MAX_STAR_DEGREE}")
    return sum((p.term() for p in partitions(d)), Fraction(0))


def star_reduction_series(d: int) -> TruncatedSeries:
    """exp(-d·Σ t^i/i) = (1-t)^d through t^d."""
    t = TruncatedSeries.variable(d, Fraction)
    return (1 - t).pow_series(d)


@dataclass(frozen=True)
class CancellationReport:
    d: int
    total: Fraction
    trivial_term: Fraction
    remainder: Fraction
    odd_sum: Fraction
    even_sum: Fraction
    partition_count: int

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "total": str(self.total),
            "trivial_term": str(self.trivial_term),
            "remainder": str(self.remainder),
            "odd_sum": str(self.odd_sum),
            "even_sum": str(self.even_sum),
            "partition_count": self.partition_count,
        }


def cancellation_report(d: int) -> CancellationReport:
    """Split the star sum into the r_d = 1 term and proper partitions by parity of summands."""
    trivial = Fraction(0)
    odd = Fraction(0)
    even = Fraction(0)
    count = 0
    for p in partitions(d):
        count += 1
        term = p.term()
        if p.trivial:
            trivial += term
        elif p.summands % 2:
            odd += term
        else:
            even += term
    return CancellationReport(d, trivial + odd + even, trivial, odd + even, odd, even, count)


# --- verification ---

def verify_m_d(d: int, points: Sequence[LambdaPoint] = SHIPPED_LAMBDAS,
               convention: SignConvention = SignConvention.FLAGS) -> List[VerificationReport]:
    """m_d = 1/d³ at every point, hence independent of λ."""
    expected = Fraction(1, d ** 3)
    reports = []
    values = {}
    for point in points:
        if d >= 2 and point.lambda1 == point.lambda2:
            raise LambdaError(f"lambda point {point} is not admissible for d = {d}")
        value = m_d_full(d, point, convention)
        values[str(point)] = str(value)
        reports.append(compare_values(f"m_{d} at lambda={point}", value, expected))
    reports.append(VerificationReport(
        name=f"m_{d} independent of lambda",
        passed=len(set(values.values())) <= 1,
        details=values,
    ))
    return reports


def verify_homogeneity(d: int, point: LambdaPoint, c) -> VerificationReport:
    return compare_values(
        f"m_{d} homogeneous of degree zero at {point}, c={c}",
        m_d_full(d, point.scaled(Fraction(c))),
        m_d_full(d, point),
    )


def verify_sign_conventions(d: int) -> VerificationReport:
    """Both sign readings agree at λ2 = 0, where only colour-2 leaves survive."""
    point = LambdaPoint(1, 0)
    return compare_values(
        f"m_{d} at lambda2=0: flag sign equals vertex sign",
        m_d_full(d, point, SignConvention.FLAGS),
        m_d_full(d, point, SignConvention.VERTICES),
    )


def verify_star_identity(d_max: int = 30) -> List[VerificationReport]:
    reports = []
    for d in range(1, d_max + 1):
        total = star_reduction_sum(d)
        reports.append(compare_values(f"star sum d={d} equals (-1)^d", total, Fraction((-1) ** d)))
        series = star_reduction_series(d)
        reports.append(compare_values(
            f"star sum d={d} equals the t^{d} coefficient of (1-t)^d", total, series.coefficient(d)
        ))
    return reports


def verify_cancellation(d_max: int = 15) -> List[VerificationReport]:
    """Trivial term -1; proper partitions leave 1 + (-1)^d."""
    reports = []
    for d in range(1, d_max + 1):
        report = cancellation_report(d)
        expected = (Fraction(-1), Fraction(1 + (-1) ** d))
        reports.append(compare_values(
            f"cancellation d={d}",
            (report.trivial_term, report.remainder),
            expected,
            details={"odd_sum": str(report.odd_sum), "even_sum": str(report.even_sum)},
        ))
    return reports


def verify_star_series_route(d: int) -> VerificationReport:
    """(1-t)^d agrees with its binomial expansion."""
    t_series = star_reduction_series(d)
    binomial = TruncatedSeries.from_coefficients(
        [Fraction((-1) ** k * comb(d, k)) for k in range(d + 1)], d, Fraction
    )
    return compare_series(f"(1-t)^{d} by exp-log and by binomial", t_series, binomial)


def verify_coverings(max_d: int = MAX_FULL_DEGREE, star_max: int = 30,
                     cancellation_max: int = 15) -> List[VerificationReport]:
    reports: List[VerificationReport] = []
    for d in range(1, max_d + 1):
        reports.extend(verify_m_d(d))
        reports.append(verify_homogeneity(d, LambdaPoint(2, 3), Fraction(-3, 2)))
        reports.append(verify_sign_conventions(d))
    reports.extend(verify_star_identity(star_max))
    reports.extend(verify_cancellation(cancellation_max))
    reports.append(verify_star_series_route(star_max))
    return reports


def covering_summary(d: int, point: LambdaPoint) -> Dict[str, str]:
    value = m_d_full(d, point)
    expected = Fraction(1, d ** 3)
    return {
        "d": str(d),
        "lambda": f"{point.lambda1},{point.lambda2}",
        "m_d": str(value),
        "expected": str(expected),
        "matches": str(value == expected).lower(),
    }


def term_table(d: int, point: LambdaPoint) -> List[Tuple[str, str]]:
    """(canonical code, term) pairs in code order."""
    return [(term.tree.canonical_code(), str(term.value)) for term in covering_terms(d, point)]
