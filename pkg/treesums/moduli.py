# Genus-Zero Moduli
# Poincaré polynomials and Euler characteristics of moduli of stable pointed
# rational curves, by strata, by recursion and by series equations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence

from mpmath import mp, mpf

from treesums.algebra import (
    Q2,
    CoefficientRecursion,
    QPolynomial,
    TreeSumsError,
    TruncatedSeries,
    falling_factorial,
    linear_fractional_recursion,
    linear_fractional_residual,
    solve_ode_recursive,
)
from treesums.partition import (
    DEFAULT_MAX_TREE_VERTICES,
    moduli_data,
    partition_function_direct,
    solve_critical_point,
)
from treesums.reports import VerificationReport, compare_series, compare_values, zero_residual
from treesums.tables import ModuliRow, ModuliTable
from treesums.trees import MarkedStableTree, enumerate_marked_stable

logger = logging.getLogger(__name__)

RAMIFICATION_SAMPLES = (Fraction(2), Fraction(3), Fraction(4))
ASYMPTOTIC_DPS = 50


class RamificationError(TreeSumsError):
    """The ramification substitution is undefined at this value of q²."""


# --- strata ---

@lru_cache(maxsize=None)
def poincare_open(k: int) -> QPolynomial:
    """Open part with k marked points: (q²-2)(q²-3)···(q²-k+1)."""
    if k < 3:
        raise ValueError("open moduli need k >= 3")
    return falling_factorial(Q2 - 2, k - 3)


def stratum_poly(tree: MarkedStableTree) -> QPolynomial:
    """Product of the open parts over the interior vertices."""
    result = QPolynomial.one()
    for valency in tree.interior_valencies():
        result = result * poincare_open(valency)
    return result


def poincare_compact_strata(n: int) -> QPolynomial:
    """Sum over all n-marked stable trees of their stratum polynomials."""
    valency_profiles: Dict[tuple, int] = {}
    trees = enumerate_marked_stable(n)
    for tree in trees:
        key = tuple(sorted(tree.interior_valencies()))
        valency_profiles[key] = valency_profiles.get(key, 0) + 1
    total = QPolynomial.zero()
    for profile, count in sorted(valency_profiles.items()):
        term = QPolynomial.one()
        for valency in profile:
            term = term * poincare_open(valency)
        total = total + term * count
    logger.info(f"strata sum for n={n} over {len(trees)} marked stable trees")
    return total


# --- recursions and series ---

def phi_recursion() -> CoefficientRecursion:
    """(n+1)p_{n+1} = p_n + q²·Σ_{i+j=n+1, i≥2, j≥1} j·p_i·p_j."""

    def step(p: Sequence[QPolynomial], n: int) -> QPolynomial:
        acc = QPolynomial.zero()
        for i in range(2, n + 1):
            j = n + 1 - i
            acc = acc + p[i] * p[j] * j
        return (p[n] + Q2 * acc) * Fraction(1, n + 1)

    return CoefficientRecursion(step=step, seeds=(0, 1, Fraction(1, 2)), name="phi recursion")


def phi_series(order: int) -> TruncatedSeries:
    """φ = Σ P(M̄_{0,n+1}) t^n/n! through t^order."""
    return solve_ode_recursive(phi_recursion(), order)


def phi_series_via_ode(order: int) -> TruncatedSeries:
    """φ from (1 + q²t - q²φ)φ' = 1 + φ."""
    return solve_ode_recursive(linear_fractional_recursion(Q2, Q2, name="phi ode"), order)


def chi_series(order: int) -> TruncatedSeries:
    """χ = Σ χ(M̄_{0,n+1}) t^n/n! from (1 + t - χ)χ' = 1 + χ, over the rationals."""
    return solve_ode_recursive(linear_fractional_recursion(1, 1, Fraction, name="chi ode"), order)


def poincare_compact_recursive(n: int) -> QPolynomial:
    return poincare_table_recursive(n)[n]


def poincare_table_recursive(n_max: int) -> Dict[int, QPolynomial]:
    """P_{n+2} = P_{n+1} + q²·Σ_{i+j=n+1, i≥2, j≥1} C(n,i)·P_{i+1}·P_{j+1}, keyed by n.

    Index 2 holds the convention P_2 = 1 that makes the recursion start.
    """
    if n_max < 3:
        raise ValueError("n must be at least 3")
    table = {2: QPolynomial.one(), 3: QPolynomial.one()}
    for n in range(2, n_max - 1):
        acc = QPolynomial.zero()
        for i in range(2, n + 1):
            j = n + 1 - i
            acc = acc + table[i + 1] * table[j + 1] * comb(n, i)
        table[n + 2] = table[n + 1] + Q2 * acc
    return table


def euler_numbers(n_max: int) -> List[int]:
    """χ(M̄_{0,n+1}) for n = 1..n_max as exact integers.

    X_1 = 1 and X_{n+1} = (1-n)·X_n + Σ_{i=1..n} C(n,i)·X_i·X_{n+1-i}.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    values = [0, 1]
    for n in range(1, n_max):
        acc = (1 - n) * values[n]
        for i in range(1, n + 1):
            acc += comb(n, i) * values[i] * values[n + 1 - i]
        values.append(acc)
    return values[1:]


def euler_numbers_alternate(n_max: int) -> List[int]:
    """The same numbers from the Poincaré recursion at q = -1."""
    values = [0, 1]
    for n in range(1, n_max):
        acc = values[n]
        for i in range(2, n + 1):
            acc += comb(n, i) * values[i] * values[n + 1 - i]
        values.append(acc)
    return values[1:]


def moduli_table(max_n: int) -> ModuliTable:
    """Rows n = 3..max_n by recursion."""
    table = poincare_table_recursive(max_n)
    rows = [
        ModuliRow(n, table[n], int(table[n].evaluate(-1)))
        for n in range(3, max_n + 1)
    ]
    logger.info(f"moduli table with {len(rows)} rows")
    return ModuliTable(rows)


# --- equation residuals ---

def phi_functional_residual(phi: TruncatedSeries) -> TruncatedSeries:
    """(1+φ)^{q²} - q⁴φ + q²(q²-1)t - 1."""
    t = TruncatedSeries.variable(phi.order)
    return (phi + 1).pow_series(Q2) - phi * (Q2 * Q2) + t * (Q2 * (Q2 - 1)) - 1


def phi_ode_residual(phi: TruncatedSeries) -> TruncatedSeries:
    return linear_fractional_residual(phi, Q2, Q2)


def chi_functional_residual(chi: TruncatedSeries) -> TruncatedSeries:
    """(1+χ)log(1+χ) - 2χ + t."""
    t = TruncatedSeries.variable(chi.order, Fraction)
    return (chi + 1) * chi.log1p() - chi * 2 + t


def chi_ode_residual(chi: TruncatedSeries) -> TruncatedSeries:
    return linear_fractional_residual(chi, 1, 1)


def verify_phi_equations(series: TruncatedSeries, order: int) -> List[VerificationReport]:
    """Functional and differential equations for φ through ``order``."""
    phi = series.truncate(order)
    return [
        zero_residual("phi functional equation", phi_functional_residual(phi),
                      "(1+φ)^{q²} - q⁴φ + q²(q²-1)t - 1 = 0"),
        zero_residual("phi differential equation", phi_ode_residual(phi),
                      "(1+q²t-q²φ)φ' - 1 - φ = 0"),
    ]


def verify_chi_equations(series: TruncatedSeries, order: int) -> List[VerificationReport]:
    chi = series.truncate(order)
    return [
        zero_residual("chi functional equation", chi_functional_residual(chi),
                      "(1+χ)log(1+χ) - 2χ + t = 0"),
        zero_residual("chi differential equation", chi_ode_residual(chi),
                      "(1+t-χ)χ' - 1 - χ = 0"),
    ]


def verify_euler_specialization(order: int) -> VerificationReport:
    return compare_series(
        "chi is phi at q=-1",
        phi_series(order).specialize(-1),
        chi_series(order),
        "Euler characteristics are Poincaré polynomials at q = -1",
    )


def verify_euler_recursions(n_max: int) -> VerificationReport:
    return compare_values(
        "Euler recursions agree",
        euler_numbers(n_max),
        euler_numbers_alternate(n_max),
        "differential-equation recursion against the Poincaré recursion at q = -1",
    )


# --- agreement of the independent routes ---

def verify_three_way(max_n: int, max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> List[VerificationReport]:
    """Strata sum, recursion and tree sum agree for 3 <= n <= max_n."""
    recursive = poincare_table_recursive(max_n)
    direct = partition_function_direct(moduli_data(), max_n, max_tree_vertices)
    phi = phi_series(max_n - 1)
    reports = []
    for n in range(3, max_n + 1):
        strata = poincare_compact_strata(n)
        from_tree_sum = direct.coefficient(n) * factorial(n)
        from_phi = phi.coefficient(n - 1) * factorial(n - 1)
        passed = strata == recursive[n] == from_tree_sum == from_phi
        report = VerificationReport(
            name=f"moduli n={n}: strata = recursion = tree sum = series",
            passed=passed,
            details={
                "strata": strata.to_string(),
                "recursion": recursive[n].to_string(),
                "tree_sum": from_tree_sum.to_string(),
                "series": from_phi.to_string(),
            },
        )
        if not passed:
            logger.error(f"moduli n={n}: routes disagree")
        reports.append(report)
    return reports


def verify_table_properties(table: ModuliTable) -> List[VerificationReport]:
    """Even, palindromic, non-negative integral, constant term 1, χ = P(-1)."""
    reports = []
    for row in table.rows:
        p = row.poincare
        checks = {
            "even": p.is_even(),
            "palindromic": p.is_palindromic(),
            "nonnegative_integral": p.has_nonnegative_integer_coefficients(),
            "constant_term_one": p.constant_term == 1,
            "euler_is_p_at_minus_one": p.evaluate(-1) == row.euler,
        }
        reports.append(VerificationReport(
            name=f"moduli n={row.n}: polynomial shape",
            passed=all(checks.values()),
            details=checks,
        ))
    return reports


def verify_critical_point_series(order: int) -> List[VerificationReport]:
    """The potential's critical point is φ, and at q = -1 it is χ."""
    potential = solve_critical_point(moduli_data(), order)
    critical = potential.critical_point[0]
    reports = [compare_series("critical point equals phi", critical, phi_series(order))]
    reports.extend(
        r.model_copy(update={"name": f"critical point: {r.name}"})
        for r in verify_phi_equations(critical, order)
    )
    reports.append(compare_series(
        "critical point at q=-1 equals chi", critical.specialize(-1), chi_series(order)
    ))
    return reports


# --- asymptotics ---

@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    chi: int
    log_chi: float
    log_f: float
    relative_error: float
    ratio: float


def log_asymptotic(n: int) -> mpf:
    """log f(n) for f(n) = n^{-1/2}·(n/(e²-2e))^{n-1/2}, at the working precision."""
    base = mp.e ** 2 - 2 * mp.e
    return -mp.log(n) / 2 + (n - mpf(1) / 2) * (mp.log(n) - mp.log(base))


def chi_asymptotic_report(n_max: int) -> List[AsymptoticRow]:
    """χ(M̄_{0,n+1}) against f(n) for 2 <= n <= n_max, compared at log scale."""
    if n_max > 500:
        raise ValueError("n_max is capped at 500")
    values = euler_numbers(n_max)
    rows = []
    with mp.workdps(ASYMPTOTIC_DPS):
        for n in range(2, n_max + 1):
            chi = values[n - 1]
            log_chi = mp.log(mpf(chi))
            log_f = log_asymptotic(n)
            rows.append(AsymptoticRow(
                n=n,
                chi=chi,
                log_chi=float(log_chi),
                log_f=float(log_f),
                relative_error=float(abs(log_chi - log_f) / abs(log_f)),
                ratio=float(mp.exp(log_chi - log_f)),
            ))
    return rows


def verify_asymptotics(n_max: int = 200, start: int = 50, tolerance: float = 0.02) -> VerificationReport:
    rows = {row.n: row for row in chi_asymptotic_report(n_max)}
    window = [rows[n].relative_error for n in range(start, n_max + 1)]
    decreasing = all(b < a for a, b in zip(window, window[1:]))
    final = rows[n_max].relative_error
    passed = decreasing and final < tolerance
    if not passed:
        logger.error(f"asymptotics: error {final:.4g} at n={n_max}, decreasing={decreasing}")
    return VerificationReport(
        name="Euler characteristic asymptotics",
        description="log-relative error against n^{-1/2}(n/(e²-2e))^{n-1/2}",
        passed=passed,
        details={
            "relative_error": final,
            "decreasing": decreasing,
            "ratio": rows[n_max].ratio,
        },
    )


# --- ramification ---

def at_q_squared(poly: QPolynomial, q_squared: Fraction) -> Fraction:
    """Evaluate an even polynomial at a value of q²."""
    if not poly.is_even():
        raise RamificationError(f"{poly} is not a polynomial in q²")
    return sum(
        (c * q_squared ** (power // 2) for power, c in enumerate(poly.coeffs) if c),
        Fraction(0),
    )


def log_derivative_term(w: TruncatedSeries, root: Fraction, weight: Fraction, label: str) -> TruncatedSeries:
    shifted = w - root
    if shifted.constant_term == 0:
        raise RamificationError(f"w - {label} vanishes at t = 0")
    dw = w.derivative()
    return dw * shifted.truncate(dw.order).reciprocal() * weight


def verify_ramification(q_squared, order: int) -> List[VerificationReport]:
    """Logarithmic-derivative form of Cx = (w-1)^{A1}(w-1/q²)^{A2} at a rational q²."""
    s = Fraction(q_squared)
    if s in (0, 1):
        raise RamificationError(f"q² = {s} makes the exponents undefined")
    if s == -1:
        raise RamificationError("q² = -1 makes x vanish at t = 0")
    phi = phi_series(order).map_coefficients(lambda c: at_q_squared(c, s), Fraction)
    t = TruncatedSeries.variable(order, Fraction)
    y = t * s - phi * s + 1
    x = t * s + (s + 1)
    w = y * x.reciprocal()
    w1, w2 = Fraction(1), 1 / s
    a1, a2 = s / (1 - s), 1 / (s - 1)
    dx = x.derivative()
    left = (log_derivative_term(w, w1, a1, "w1") + log_derivative_term(w, w2, a2, "w2"))
    right = dx * x.truncate(dx.order).reciprocal()
    # y·y_x = a·x + b·y with y_x = y_t / q²
    ode = y.truncate(order - 1) * y.derivative() * (1 / s) - (x * (-1 / s) + y * (1 + 1 / s)).truncate(order - 1)
    label = f"q²={s}"
    return [
        compare_series(f"ramification {label}: logarithmic derivatives", left, right),
        zero_residual(f"ramification {label}: first-order equation", ode),
        compare_values(f"ramification {label}: x(0)", x.constant_term, s + 1),
        compare_values(f"ramification {label}: y(0)", y.constant_term, Fraction(1)),
        compare_values(f"ramification {label}: w(0)", w.constant_term, 1 / (s + 1)),
    ]
