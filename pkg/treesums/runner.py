# Suite Runner
# Executes the verification suites and records each run

import logging
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from treesums.algebra import Q2, QPolynomial, TreeSumsError, TruncatedSeries, falling_factorial
from treesums.config_manager import MAX_STRATA_N, ResultStore
from treesums.configuration import (
    SHIPPED_INSTANCES,
    ConfigInstance,
    chi_conf_series,
    verify_agreement,
    verify_euler_specialization as verify_conf_euler_specialization,
    verify_expansion_brackets,
    verify_kappa,
    verify_psi_relation,
    verify_ramification_conf,
    verify_series_equations,
    verify_strata_split,
)
from treesums.coverings import verify_coverings
from treesums.moduli import (
    RAMIFICATION_SAMPLES,
    chi_series,
    moduli_table,
    phi_series,
    phi_series_via_ode,
    verify_asymptotics,
    verify_chi_equations,
    verify_critical_point_series,
    verify_euler_recursions,
    verify_euler_specialization,
    verify_phi_equations,
    verify_ramification,
    verify_table_properties,
    verify_three_way,
)
from treesums.partition import (
    configuration_data,
    moduli_data,
    quadratic_data,
    verify_critical_point,
    verify_tree_sum,
)
from treesums.reports import SuiteReport, VerificationReport, compare_series, compare_values
from treesums.trees import (
    enumerate_covering_trees,
    enumerate_marked_stable,
    enumerate_nests,
    enumerate_trees,
    nest_to_tree,
    tree_to_nest,
)

logger = logging.getLogger(__name__)

TREE_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 6, 7: 11, 8: 23, 9: 47, 10: 106}
MARKED_STABLE_COUNTS = {3: 1, 4: 4, 5: 26, 6: 236}
NEST_COUNTS = {2: 2, 3: 8, 4: 52}
COVERING_COUNTS = {1: 1, 2: 3, 3: 6}
CONFIG_RAMIFICATION_SAMPLES = ((Fraction(2), 1), (Fraction(3), 2))


@dataclass(frozen=True)
class SuiteOptions:
    order: int = 12
    max_n: int = 7


@dataclass
class RunResult:
    """Result of a suite execution."""
    success: bool
    suite: str
    report: SuiteReport
    error: str
    start_time: datetime
    end_time: datetime

    @property
    def duration_seconds(self) -> float:
        return (self.end_time - self.start_time).total_seconds()


@dataclass
class RunnerState:
    """Current state of the runner."""
    last_run: Optional[RunResult] = None
    current_suite: str = ""
    completed_checks: int = 0


# --- suites ---

def algebra_suite(options: SuiteOptions) -> List[VerificationReport]:
    order = options.order
    reports = [verify_kappa(ConfigInstance(m, QPolynomial.one())) for m in range(1, 5)]
    phi = phi_series(order)
    reports.append(compare_series("exp(log(1+s)) = 1+s for s = phi", phi.log1p().exp() - 1, phi))
    base = phi + 1
    left = base.pow_series(Q2) * base.pow_series(1 - Q2 + Q2 * Q2)
    reports.append(compare_series("(1+s)^a (1+s)^b = (1+s)^(a+b)", left, base.pow_series(1 + Q2 * Q2)))
    reports.append(compare_series("(1+s)^3 by pow_series and by products", base.pow_series(3), base ** 3))
    x = Q2 - 2
    reports.append(compare_values(
        "falling factorial (x)_5 = (x)_2 (x-2)_3",
        falling_factorial(x, 5),
        falling_factorial(x, 2) * falling_factorial(x - 2, 3),
    ))
    reports.append(compare_series(
        "reciprocal times series is one",
        base * base.reciprocal(),
        TruncatedSeries.one(order),
    ))
    table = moduli_table(min(options.max_n, 12))
    reports.append(compare_values(
        "polynomial text round trip on the moduli table",
        [QPolynomial.parse(row.poincare.to_string()) for row in table.rows],
        [row.poincare for row in table.rows],
    ))
    return reports


def trees_suite(options: SuiteOptions) -> List[VerificationReport]:
    reports = [
        compare_values("unlabeled tree counts",
                       {n: len(enumerate_trees(n)) for n in TREE_COUNTS}, TREE_COUNTS),
        compare_values("marked stable tree counts",
                       {n: len(enumerate_marked_stable(n)) for n in MARKED_STABLE_COUNTS},
                       MARKED_STABLE_COUNTS),
        compare_values("nest counts",
                       {n: len(enumerate_nests(n)) for n in NEST_COUNTS}, NEST_COUNTS),
        compare_values("covering tree classes",
                       {d: len(enumerate_covering_trees(d)) for d in COVERING_COUNTS}, COVERING_COUNTS),
    ]
    for n in range(2, 5):
        nests = enumerate_nests(n)
        reports.append(compare_values(
            f"nest to admissible tree and back, n={n}",
            [tree_to_nest(nest_to_tree(nest)) for nest in nests],
            nests,
        ))
    return reports


def engine_suite(options: SuiteOptions) -> List[VerificationReport]:
    order = min(options.order, 7)
    reports: List[VerificationReport] = []
    for data in (quadratic_data(), moduli_data(), configuration_data(Q2 + 1, 1)):
        reports.extend(verify_tree_sum(data, order))
    reports.extend(verify_critical_point(moduli_data(), options.order))
    return reports


def moduli_suite(options: SuiteOptions) -> List[VerificationReport]:
    order = options.order
    phi = phi_series(order)
    reports = verify_phi_equations(phi, order)
    reports.append(compare_series("phi by functional recursion and by ODE", phi, phi_series_via_ode(order)))
    reports.extend(verify_chi_equations(chi_series(order), order))
    reports.append(verify_euler_specialization(order))
    reports.append(verify_euler_recursions(max(order, 20)))
    reports.extend(verify_three_way(MAX_STRATA_N))
    reports.extend(verify_table_properties(moduli_table(max(options.max_n, 8))))
    reports.extend(verify_critical_point_series(order))
    reports.append(verify_asymptotics())
    for q_squared in RAMIFICATION_SAMPLES:
        reports.extend(verify_ramification(q_squared, order))
    return reports


def config_suite(options: SuiteOptions) -> List[VerificationReport]:
    order = min(options.order, 8)
    reports: List[VerificationReport] = []
    for inst in SHIPPED_INSTANCES:
        reports.append(verify_kappa(inst))
        reports.extend(verify_series_equations(inst, order))
        reports.extend(verify_agreement(inst, 5))
        reports.append(verify_psi_relation(inst, order))
        reports.extend(verify_expansion_brackets(inst))
        reports.extend(verify_strata_split(inst, 5))
        reports.append(verify_conf_euler_specialization(inst, order))
    for m in (1, 2):
        reports.append(compare_series(
            f"chi(X) = 0 gives the constant series 1 (m={m})",
            chi_conf_series(0, m, order),
            TruncatedSeries.one(order, Fraction),
        ))
    for q_squared, m in CONFIG_RAMIFICATION_SAMPLES:
        reports.extend(verify_ramification_conf(q_squared, m, options.order))
    return reports


def coverings_suite(options: SuiteOptions) -> List[VerificationReport]:
    return verify_coverings()


SUITE_FUNCTIONS: Dict[str, Callable[[SuiteOptions], List[VerificationReport]]] = {
    "algebra": algebra_suite,
    "trees": trees_suite,
    "engine": engine_suite,
    "moduli": moduli_suite,
    "config": config_suite,
    "coverings": coverings_suite,
}


class SuiteRunner:
    """Runs named verification suites and records each run."""

    def __init__(self, store: Optional[ResultStore] = None):
        self.store = store or ResultStore()
        self.state = RunnerState()

    def run(self, suite: str = "all", options: Optional[SuiteOptions] = None,
            on_report: Optional[Callable[[VerificationReport], None]] = None) -> RunResult:
        """
        Execute a suite, or every suite for "all".

        Args:
            suite: suite name
            options: truncation order and table size
            on_report: callback invoked for each finished check

        Returns:
            RunResult with the aggregated SuiteReport and timing
        """
        options = options or SuiteOptions()
        names = list(SUITE_FUNCTIONS) if suite == "all" else [suite]
        if any(name not in SUITE_FUNCTIONS for name in names):
            raise ValueError(f"unknown suite '{suite}'")

        self.state.current_suite = suite
        self.state.completed_checks = 0

        start_time = datetime.now()
        report = SuiteReport(suite=suite)
        error = ""
        logger.info('=' * 60)
        logger.info(f"Suite '{suite}' (order {options.order}, max_n {options.max_n}) - RUNNING")
        logger.info('=' * 60)

        try:
            for name in names:
                logger.info(f"running suite '{name}'")
                for item in SUITE_FUNCTIONS[name](options):
                    report.reports.append(item)
                    self.state.completed_checks += 1
                    if on_report:
                        on_report(item)
        except TreeSumsError as e:
            error = f"{type(e).__name__}: {e}"
            logger.error(error)

        end_time = datetime.now()
        success = not error and report.passed
        status = "SUCCESS" if success else "FAILED"
        duration = (end_time - start_time).total_seconds()
        logger.info('=' * 60)
        logger.info(f"Completed: {status} in {duration:.1f} seconds, "
                    f"{len(report.reports)} checks, {len(report.failures)} failed")
        logger.info('=' * 60)

        result = RunResult(
            success=success,
            suite=suite,
            report=report,
            error=error,
            start_time=start_time,
            end_time=end_time,
        )
        self.store.save_run({
            "timestamp": start_time.isoformat(),
            "suite": suite,
            "success": success,
            "duration_seconds": round(duration, 1),
            "checks": len(report.reports),
            "failures": [r.name for r in report.failures],
            "error": error,
        })

        self.state.last_run = result
        self.state.current_suite = ""

        return result
