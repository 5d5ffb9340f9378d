#! /usr/bin/env python
"""Command line entry point: run, sweep and oracle-check."""

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Final, List, NoReturn, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from features.association import SolverConfig
from features.config_parser import load_scenario, open_scenario_file
from features.core import METHODS, AppCore
from features.metrics import DEFAULT_SIGMAS, sweep_sigma
from features.oracle import ORACLE_RESTARTS, oracle_check
from features.report_render import ReportRender

logger = logging.getLogger("otcell")

EXIT_OK: Final[int] = 0
EXIT_INPUT: Final[int] = 1
EXIT_ORACLE_FAILED: Final[int] = 2
EXIT_NOT_CONVERGED: Final[int] = 3


class UsageError(Exception):
    pass


class OtcellArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-failure code."""

    def error(self: "OtcellArgumentParser", message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _sigma_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.replace(" ", "").split(",") if item]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid sigma list '{text}'") from e


def _add_solver_flags(parser: argparse.ArgumentParser, restarts: int = 0) -> None:
    defaults = SolverConfig()
    parser.add_argument("--tol", type=float, default=defaults.tol, help="mass change tolerance of the fixed point")
    parser.add_argument("--max-iter", type=int, default=defaults.max_iter, help="iteration cap, fixed point and cell exchanges together")
    parser.add_argument("--damping", type=float, default=defaults.damping, help="initial damping of the mass update")
    parser.add_argument("--restarts", type=int, default=restarts, help="extra random starting partitions")


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, type=Path, help="scenario file (toml / yaml)")
    parser.add_argument("--grid", nargs=2, type=int, default=[200, 200], metavar=("NX", "NY"), help="integration grid size")
    parser.add_argument("--b", type=float, default=None, dest="payload_bits", help="payload bits per user")


def build_parser() -> argparse.ArgumentParser:
    parser = OtcellArgumentParser(prog="otcell", description="Delay-optimal cell association for UAV / base station networks")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=OtcellArgumentParser)

    run = commands.add_parser("run", help="associate users of one scenario")
    _add_scenario_flags(run)
    run.add_argument("--method", choices=METHODS, default="ot")
    run.add_argument("--sigma", type=float, default=None, help="hotspot width override (m)")
    run.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    run.add_argument("--seed", type=int, default=0, help="seed of the random restarts")
    _add_solver_flags(run)

    sweep = commands.add_parser("sweep", help="delay of both associations over hotspot widths")
    _add_scenario_flags(sweep)
    sweep.add_argument("--sigma", type=_sigma_list, default=list(DEFAULT_SIGMAS), help="comma separated hotspot widths (m)")
    sweep.add_argument("--out", type=Path, default=Path("sweep.csv"), help="output CSV file")
    _add_solver_flags(sweep)

    oracle = commands.add_parser("oracle-check", help="compare the fixed point with exhaustive search")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--trials", type=int, default=100)
    oracle.add_argument("--out", type=Path, default=None, help="also write the report to this file")
    _add_solver_flags(oracle, restarts=ORACLE_RESTARTS)

    return parser


def solver_config(args: argparse.Namespace) -> SolverConfig:
    defaults = SolverConfig()
    return SolverConfig(
        tol=args.tol,
        max_iter=args.max_iter,
        damping=args.damping,
        min_damping=min(defaults.min_damping, args.damping),
        restarts=args.restarts,
        seed=getattr(args, "seed", defaults.seed),
    )


def _check_payload(payload_bits: Optional[float]) -> None:
    if payload_bits is not None and not payload_bits > 0:
        raise UsageError("--b must be positive")


def _write_atomic(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", dir=path.parent, suffix=".tmp", delete=False, encoding="utf-8", newline="") as tmp:
        frame.to_csv(tmp, index=False, float_format="%.12g")
    os.replace(tmp.name, path)


def cmd_run(args: argparse.Namespace) -> int:
    _check_payload(args.payload_bits)

    core = AppCore("Failed to load scenario", "Failed to run association")
    core.load_scenario_file(open_scenario_file(args.scenario))
    if core.scenario_error_message:
        logger.error(core.scenario_error_message)
        return EXIT_INPUT

    if args.payload_bits is not None and core.scenario is not None:
        core.scenario = core.scenario.model_copy(update={"payload_bits": args.payload_bits})

    nx, ny = args.grid
    core.run(args.method, nx, ny, solver_config(args), sigma=args.sigma, base_dir=args.scenario.parent)
    if core.run_error_message:
        logger.error(core.run_error_message)
        return EXIT_INPUT

    for path in core.write_outputs(args.out):
        logger.info(f"[run] wrote {path}")
    print(f"average delay: {core.average_delay:.9g} s")

    if not core.is_converged:
        logger.error(f"[run] no exchange-stable partition within {args.max_iter} iterations, outputs hold the best one found")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    _check_payload(args.payload_bits)
    if not args.sigma:
        raise UsageError("--sigma list must not be empty")

    scenario = load_scenario(args.scenario)
    if args.payload_bits is not None:
        scenario = scenario.model_copy(update={"payload_bits": args.payload_bits})

    nx, ny = args.grid
    table = sweep_sigma(scenario, args.sigma, nx, ny, solver_config(args))
    _write_atomic(table, args.out)
    logger.info(f"[sweep] wrote {len(table)} rows to {args.out}")

    print(table.to_string(index=False))
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")

    report = oracle_check(args.seed, args.trials, solver_config(args))
    render = ReportRender("oracle_report.j2")
    if not render.apply_context({"report": report.model_dump(), "passed": report.passed}):
        raise ValueError(f"report rendering failed: {render.error_message}")

    text = render.render_content or ""
    print(text, end="")
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")

    return EXIT_OK if report.passed else EXIT_ORACLE_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )

    commands = {"run": cmd_run, "sweep": cmd_sweep, "oracle-check": cmd_oracle_check}
    try:
        return commands[args.command](args)

    except UsageError as e:
        parser.print_usage(sys.stderr)
        logger.error(str(e))
        return EXIT_INPUT

    except (OSError, ValueError, ValidationError) as e:
        logger.error(str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
