# treesums - Command Line Interface
# Tables of Poincaré polynomials and Euler characteristics, multiple-cover sums
# and the verification suites

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from treesums.algebra import TreeSumsError
from treesums.config_manager import RunConfig, ResultStore, configure_logging
from treesums.configuration import ConfigInstance, config_table, poincare_confspace_strata
from treesums.coverings import (
    SHIPPED_LAMBDAS,
    cancellation_report,
    covering_summary,
    star_reduction_sum,
)
from treesums.moduli import euler_numbers, euler_numbers_alternate, moduli_table, poincare_compact_strata
from treesums.runner import SuiteOptions, SuiteRunner
from treesums.tables import EulerTable, dump_json

APP_VERSION = "1.0.0"

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesums",
        description="Exact generating functions for moduli and configuration spaces via sums over trees",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "pretty"], default="pretty")
    common.add_argument("--output", help="write the result to this file instead of stdout")
    common.add_argument("--log-level", default="INFO", help="DEBUG, INFO or ERROR")
    common.add_argument("--history-dir", help="directory for run history and the log file")

    commands = parser.add_subparsers(dest="command", required=True)

    moduli = commands.add_parser("moduli", parents=[common], help="Poincaré polynomials of M̄_{0,n}")
    moduli.add_argument("--max-n", type=int, default=7)
    moduli.add_argument("--strata", action="store_true", help="cross-check every row by strata sums")

    euler = commands.add_parser("euler", parents=[common], help="Euler characteristics of M̄_{0,n}")
    euler.add_argument("--max-n", type=int, default=7)

    config = commands.add_parser("config", parents=[common], help="Poincaré polynomials of X[n]")
    config.add_argument("--p-x", default="q^2+1", help='Poincaré polynomial of X, e.g. "q^4+q^2+1"')
    config.add_argument("--m", type=int, default=1, help="complex dimension of X")
    config.add_argument("--max-n", type=int, default=5)
    config.add_argument("--strata", action="store_true", help="cross-check every row by nest strata")

    coverings = commands.add_parser("coverings", parents=[common], help="multiple-cover contribution m_d")
    coverings.add_argument("--d", type=int, default=3)
    coverings.add_argument("--lambda", dest="lambdas", action="append", default=[],
                           help='evaluation point "a,b"; repeatable')
    coverings.add_argument("--stars", action="store_true", help="partition identity sweep up to d")

    verify = commands.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("--suite", default="all")
    verify.add_argument("--order", type=int, default=12)
    verify.add_argument("--max-n", type=int, default=7)

    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if v is not None}
    return RunConfig(**values)


def _csv(header: List[str], rows: List[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _render(config: RunConfig, data: dict, csv_text: str, pretty: str) -> str:
    if config.format == "json":
        return dump_json(data)
    if config.format == "csv":
        return csv_text
    return pretty


def _emit(config: RunConfig, text: str) -> None:
    if config.output:
        Path(config.output).write_text(text)
        logger.info(f"wrote {config.output}")
    else:
        sys.stdout.write(text)


# --- commands ---

def _moduli(config: RunConfig) -> Tuple[str, bool]:
    table = moduli_table(max(config.max_n, 3))
    passed = True
    if config.strata:
        for row in table.rows:
            if poincare_compact_strata(row.n) != row.poincare:
                logger.error(f"moduli n={row.n}: strata sum disagrees with the recursion")
                passed = False
    return _render(config, table.to_json(), table.to_csv(), table.to_pretty()), passed


def _euler(config: RunConfig) -> Tuple[str, bool]:
    max_n = max(config.max_n, 3)
    values = euler_numbers(max_n - 1)
    passed = values == euler_numbers_alternate(max_n - 1)
    if not passed:
        logger.error("Euler numbers disagree between the two recursions")
    table = EulerTable({n: values[n - 2] for n in range(3, max_n + 1)})
    return _render(config, table.to_json(), table.to_csv(), table.to_pretty()), passed


def _config(config: RunConfig) -> Tuple[str, bool]:
    inst = ConfigInstance(config.m, config.polynomial)
    table = config_table(inst, config.max_n)
    passed = True
    if config.strata:
        for row in table.rows:
            if poincare_confspace_strata(inst, row.n) != row.poincare:
                logger.error(f"configuration n={row.n}: nest strata disagree with the series")
                passed = False
    return _render(config, table.to_json(), table.to_csv(), table.to_pretty()), passed


def _stars(config: RunConfig) -> Tuple[str, bool]:
    rows = []
    passed = True
    for d in range(1, config.d + 1):
        total = star_reduction_sum(d)
        report = cancellation_report(d)
        ok = total == (-1) ** d and report.remainder == 1 + (-1) ** d
        passed = passed and ok
        rows.append((d, total, report, ok))
    data = {"kind": "stars", "rows": [dict(r[2].to_json(), matches=r[3]) for r in rows]}
    csv_text = _csv(
        ["d", "total", "trivial_term", "remainder", "odd_sum", "even_sum", "matches"],
        [[d, total, r.trivial_term, r.remainder, r.odd_sum, r.even_sum, str(ok).lower()]
         for d, total, r, ok in rows],
    )
    pretty = "".join(
        f"d={d}: sum = {total}, trivial {r.trivial_term}, remainder {r.remainder} "
        f"(odd {r.odd_sum}, even {r.even_sum})\n"
        for d, total, r, _ in rows
    )
    return _render(config, data, csv_text, pretty), passed


def _coverings(config: RunConfig) -> Tuple[str, bool]:
    if config.stars:
        return _stars(config)
    points = config.lambda_points or list(SHIPPED_LAMBDAS)
    summaries = [covering_summary(config.d, point) for point in points]
    passed = all(s["matches"] == "true" for s in summaries)
    data = {"kind": "coverings", "rows": summaries}
    header = ["d", "lambda", "m_d", "expected", "matches"]
    csv_text = _csv(header, [[s[k] for k in header] for s in summaries])
    pretty = "".join(
        f"m_{s['d']} = {s['m_d']} at lambda=({s['lambda']}); "
        f"d^-3 = {s['expected']}: {'match' if s['matches'] == 'true' else 'MISMATCH'}\n"
        for s in summaries
    )
    return _render(config, data, csv_text, pretty), passed


def _verify(config: RunConfig, store: ResultStore) -> Tuple[str, int]:
    runner = SuiteRunner(store)
    result = runner.run(config.suite, SuiteOptions(order=config.order, max_n=config.max_n))
    report = result.report
    data = report.model_dump()
    data["passed"] = report.passed
    data["error"] = result.error
    data["duration_seconds"] = round(result.duration_seconds, 3)
    csv_text = _csv(
        ["name", "passed", "order", "first_mismatch"],
        [[r.name, str(r.passed).lower(), "" if r.order is None else r.order,
          "" if r.first_mismatch is None else r.first_mismatch] for r in report.reports],
    )
    lines = [r.summary() for r in report.reports]
    lines.append(f"{len(report.reports)} checks, {len(report.failures)} failed")
    if result.error:
        lines.append(f"ERROR: {result.error}")
    text = _render(config, json.loads(json.dumps(data, default=str)), csv_text, "\n".join(lines) + "\n")
    if result.error:
        return text, EXIT_USAGE
    return text, EXIT_OK if result.success else EXIT_FAILED


def run(config: RunConfig) -> int:
    """Execute one command; 0 on success, 1 when a check fails, 2 on errors."""
    store = ResultStore(config.history_dir)
    configure_logging(config.log_level, store.get_log_file())
    try:
        if config.command == "verify":
            text, code = _verify(config, store)
        else:
            handler = {
                "moduli": _moduli,
                "euler": _euler,
                "config": _config,
                "coverings": _coverings,
            }[config.command]
            text, passed = handler(config)
            code = EXIT_OK if passed else EXIT_FAILED
    except (TreeSumsError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(config, text)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except (ValidationError, TreeSumsError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)
