# Configuration Spaces
# Poincaré polynomials and Euler characteristics of compactified configuration
# spaces X[n], by nest strata and by the y⁰ and η series

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import List, Tuple

from treesums.algebra import (
    Q2,
    QPolynomial,
    TruncatedSeries,
    falling_factorial,
    kappa,
    linear_fractional_recursion,
    linear_fractional_residual,
    solve_ode_recursive,
)
from treesums.moduli import RamificationError, at_q_squared, log_derivative_term
from treesums.partition import (
    DEFAULT_MAX_TREE_VERTICES,
    TensorData,
    configuration_data,
    partition_function_direct,
)
from treesums.reports import VerificationReport, compare_series, compare_values, zero_residual
from treesums.tables import ConfigRow, ConfigTable
from treesums.trees import AdmissibleTree, enumerate_nests, nest_to_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfigInstance:
    """A smooth compact X of dimension m with Poincaré polynomial P_X."""
    m: int
    p_x: QPolynomial

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("dimension m must be positive")
        if not isinstance(self.p_x, QPolynomial):
            object.__setattr__(self, "p_x", QPolynomial.parse(str(self.p_x)))

    @classmethod
    def parse(cls, p_x: str, m: int) -> "ConfigInstance":
        return cls(m, QPolynomial.parse(p_x))

    @cached_property
    def big_q(self) -> QPolynomial:
        """q^{2m}."""
        return QPolynomial.monomial(1, 2 * self.m)

    @cached_property
    def kappa(self) -> QPolynomial:
        return kappa(self.m)

    @property
    def euler(self) -> Fraction:
        return self.p_x.evaluate(-1)

    def tensor_data(self) -> TensorData:
        return configuration_data(self.p_x, self.m)

    def __str__(self) -> str:
        return f"m={self.m}, P_X={self.p_x}"


SHIPPED_INSTANCES = (
    ConfigInstance(1, Q2 + 1),
    ConfigInstance(2, (Q2 + 1) * (Q2 + 1)),
    ConfigInstance(2, Q2 * Q2 + Q2 + 1),
)


def verify_kappa(inst: ConfigInstance) -> VerificationReport:
    """κ_m times (q²-1) is q^{2m}-1 with no remainder."""
    quotient, remainder = (inst.big_q - 1).divmod(Q2 - 1)
    return compare_values(
        f"kappa_{inst.m} by division",
        (quotient, remainder.is_zero()),
        (inst.kappa, True),
    )


# --- strata ---

def stratum_weight(tree: AdmissibleTree, inst: ConfigInstance) -> QPolynomial:
    """Poincaré polynomial of the stratum of a nest, read off its admissible tree."""
    interior = QPolynomial.one()
    for valency in tree.interior_valencies():
        interior = interior * inst.kappa * falling_factorial(inst.big_q - 2, valency - 3)
    s = tree.source_degree
    if tree.broken:
        source = falling_factorial(inst.p_x, s)
    else:
        source = inst.p_x * inst.kappa * falling_factorial(inst.big_q - 2, s - 2)
    return source * interior


def confspace_strata_split(inst: ConfigInstance, n: int) -> Tuple[QPolynomial, QPolynomial]:
    """(whole, broken) sums of stratum polynomials over all n-nests."""
    whole = QPolynomial.zero()
    broken = QPolynomial.zero()
    nests = enumerate_nests(n)
    for nest in nests:
        weight = stratum_weight(nest_to_tree(nest), inst)
        if nest.whole:
            whole = whole + weight
        else:
            broken = broken + weight
    logger.info(f"nest strata for n={n}: {len(nests)} nests")
    return whole, broken


def poincare_confspace_strata(inst: ConfigInstance, n: int) -> QPolynomial:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return inst.p_x
    whole, broken = confspace_strata_split(inst, n)
    return whole + broken


# --- series ---

def y0_series(inst: ConfigInstance, order: int) -> TruncatedSeries:
    """y⁰ from [q^{2m}t + 1 - (q^{2m}-1+κ)y]y' = 1 + y."""
    recursion = linear_fractional_recursion(
        inst.big_q, inst.big_q - 1 + inst.kappa, name=f"y0 ({inst})"
    )
    return solve_ode_recursive(recursion, order)


def y0_functional_residual(inst: ConfigInstance, y0: TruncatedSeries) -> TruncatedSeries:
    """κ(1+y)^{q^{2m}} - q^{2m}(q^{2m}+κ-1)y + q^{2m}(q^{2m}-1)t - κ."""
    big_q, kappa_m = inst.big_q, inst.kappa
    t = TruncatedSeries.variable(y0.order)
    return ((y0 + 1).pow_series(big_q) * kappa_m
            - y0 * (big_q * (big_q + kappa_m - 1))
            + t * (big_q * (big_q - 1))
            - kappa_m)


def psi_series(inst: ConfigInstance, order: int) -> TruncatedSeries:
    """ψ_X = (1+y⁰)^{P_X} = 1 + Σ P(X[n]) t^n/n!."""
    return (y0_series(inst, order) + 1).pow_series(inst.p_x)


def phi_x_series(inst: ConfigInstance, order: int) -> TruncatedSeries:
    """φ_X = ψ_X' - P_X = Σ_{n≥2} P(X[n]) t^{n-1}/(n-1)!."""
    return psi_series(inst, order + 1).derivative() - inst.p_x


def x0_closed_form(inst: ConfigInstance, order: int) -> TruncatedSeries:
    """P·((1+y)^P + (Q+κ-1)y - Qt - 1) / (1 + (1-Q-κ)y + Qt) with Q = q^{2m}, y = y⁰."""
    big_q, kappa_m, p = inst.big_q, inst.kappa, inst.p_x
    y = y0_series(inst, order)
    t = TruncatedSeries.variable(order)
    numerator = (y + 1).pow_series(p) + y * (big_q + kappa_m - 1) - t * big_q - 1
    denominator = y * (1 - big_q - kappa_m) + t * big_q + 1
    return numerator * denominator.reciprocal() * p


def expansion_brackets(inst: ConfigInstance) -> List[QPolynomial]:
    """n!/P times the t^n coefficient of φ_X, for n = 1, 2, 3, in closed form."""
    p, k, big_q = inst.p_x, inst.kappa, inst.big_q
    first = k + p - 1
    second = (p - 1) * (p - 2) + k * (big_q - 2) + (p - 1) * k * 3 + k * k * 3
    third = (
        p * p * p - p * p * 6 + p * 11 - 6
        + k * (p * p * 6 - p * 26 + 26 + p * big_q * 4 - big_q * 9 + big_q * big_q)
        + k * k * (p * 15 + big_q * 10 - 35)
        + k * k * k * 15
    )
    return [first, second, third]


def eta_series(m: int, order: int) -> TruncatedSeries:
    """η from (t + 1 - mη)η' = 1 + η, over the rationals."""
    return solve_ode_recursive(linear_fractional_recursion(1, m, Fraction, name=f"eta (m={m})"), order)


def eta_functional_residual(m: int, eta: TruncatedSeries) -> TruncatedSeries:
    """m(1+η)log(1+η) - (m+1)η + t."""
    t = TruncatedSeries.variable(eta.order, Fraction)
    return (eta + 1) * eta.log1p() * m - eta * (m + 1) + t


def chi_conf_series(chi_x, m: int, order: int) -> TruncatedSeries:
    """χ_X(t) = (1+η)^{χ(X)}."""
    return (eta_series(m, order) + 1).pow_series(Fraction(chi_x))


def config_table(inst: ConfigInstance, max_n: int) -> ConfigTable:
    """Rows n = 1..max_n from the ψ series."""
    psi = psi_series(inst, max_n)
    rows = []
    for n in range(1, max_n + 1):
        poly = psi.coefficient(n) * factorial(n)
        rows.append(ConfigRow(n, poly, poly.evaluate(-1)))
    logger.info(f"configuration table for {inst} with {len(rows)} rows")
    return ConfigTable(inst.m, inst.p_x, rows)


# --- verification ---

def verify_series_equations(inst: ConfigInstance, order: int) -> List[VerificationReport]:
    y0 = y0_series(inst, order)
    eta = eta_series(inst.m, order)
    return [
        zero_residual(f"y0 functional equation ({inst})", y0_functional_residual(inst, y0)),
        zero_residual(f"y0 differential equation ({inst})",
                      linear_fractional_residual(y0, inst.big_q, inst.big_q - 1 + inst.kappa)),
        compare_values(f"y0 is a series in q² ({inst})",
                       all(c.is_even() for c in y0.coeffs), True),
        zero_residual(f"eta functional equation (m={inst.m})", eta_functional_residual(inst.m, eta)),
        zero_residual(f"eta differential equation (m={inst.m})",
                      linear_fractional_residual(eta, 1, inst.m)),
    ]


def verify_agreement(inst: ConfigInstance, max_n: int = 5,
                     max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> List[VerificationReport]:
    """Nest strata, ψ series, closed-form x⁰ and the tree sum agree for n <= max_n."""
    psi = psi_series(inst, max_n)
    closed = x0_closed_form(inst, max_n - 1)
    direct = partition_function_direct(inst.tensor_data(), max_n, max_tree_vertices)
    reports = []
    for n in range(1, max_n + 1):
        strata = poincare_confspace_strata(inst, n)
        routes = {
            "strata": strata,
            "psi": psi.coefficient(n) * factorial(n),
        }
        if n >= 2:
            routes["closed_form"] = closed.coefficient(n - 1) * factorial(n - 1)
            routes["tree_sum"] = direct.coefficient(n) * factorial(n)
        passed = all(value == strata for value in routes.values())
        if not passed:
            logger.error(f"configuration {inst} n={n}: routes disagree")
        reports.append(VerificationReport(
            name=f"configuration ({inst}) n={n}: all routes agree",
            passed=passed,
            details={key: value.to_string() for key, value in routes.items()},
        ))
    return reports


def verify_psi_relation(inst: ConfigInstance, order: int) -> VerificationReport:
    return compare_series(
        f"psi' = P + closed-form x0 ({inst})",
        phi_x_series(inst, order),
        x0_closed_form(inst, order),
    )


def verify_expansion_brackets(inst: ConfigInstance) -> List[VerificationReport]:
    phi_x = phi_x_series(inst, 3)
    return [
        compare_values(
            f"expansion bracket t^{n} ({inst})",
            phi_x.coefficient(n) * factorial(n),
            inst.p_x * bracket,
        )
        for n, bracket in enumerate(expansion_brackets(inst), start=1)
    ]


def verify_strata_split(inst: ConfigInstance, max_n: int = 5) -> List[VerificationReport]:
    """Whole and broken nests are equinumerous and together give the ψ coefficient."""
    psi = psi_series(inst, max_n)
    reports = []
    for n in range(2, max_n + 1):
        nests = enumerate_nests(n)
        whole_count = sum(1 for nest in nests if nest.whole)
        whole, broken = confspace_strata_split(inst, n)
        reports.append(compare_values(
            f"strata split ({inst}) n={n}",
            (whole + broken, whole_count),
            (psi.coefficient(n) * factorial(n), len(nests) - whole_count),
        ))
    return reports


def verify_euler_specialization(inst: ConfigInstance, order: int) -> VerificationReport:
    return compare_series(
        f"psi at q=-1 equals (1+eta)^chi ({inst})",
        psi_series(inst, order).specialize(-1),
        chi_conf_series(inst.euler, inst.m, order),
    )


def verify_ramification_conf(q_squared, m: int, order: int) -> List[VerificationReport]:
    """Cx = (w-1)^{A1}(w-Q)^{A2} with Q = q^{2m}, in logarithmic-derivative form."""
    s = Fraction(q_squared)
    big_q = s ** m
    if big_q in (0, 1):
        raise RamificationError(f"q^(2m) = {big_q} makes the substitution undefined")
    inst = ConfigInstance(m, QPolynomial.one())
    kappa_m = at_q_squared(inst.kappa, s)
    if big_q + kappa_m == 0:
        raise RamificationError(f"q² = {s} makes x vanish at t = 0")
    y0 = y0_series(inst, order).map_coefficients(lambda c: at_q_squared(c, s), Fraction)
    t = TruncatedSeries.variable(order, Fraction)
    y = t * big_q + 1 - y0 * (big_q + kappa_m - 1)
    x = t + (big_q + kappa_m) / big_q
    w = y * x.reciprocal()
    a1, a2 = 1 / (big_q - 1), big_q / (1 - big_q)
    left = log_derivative_term(w, Fraction(1), a1, "w1") + log_derivative_term(w, big_q, a2, "w2")
    dx = x.derivative()
    right = dx * x.truncate(dx.order).reciprocal()
    # y·y_x = -Q·x + (Q+1)·y with x' = 1
    ode = y.truncate(order - 1) * y.derivative() - (x * (-big_q) + y * (big_q + 1)).truncate(order - 1)
    label = f"q²={s}, m={m}"
    return [
        compare_series(f"ramification {label}: logarithmic derivatives", left, right),
        zero_residual(f"ramification {label}: first-order equation", ode),
        compare_values(f"ramification {label}: w(0)", w.constant_term, big_q / (big_q + kappa_m)),
    ]
