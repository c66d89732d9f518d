"""Command-line entry points for the lens CRLB toolkit."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import constants as const
from .check import format_check_report, run_check
from .config import default_config, load_config
from .curvature import curvature_scan, optimal_sigma_c
from .errors import (
    ConfigError,
    DomainError,
    InvariantViolation,
    MonteCarloTrialError,
    UnidentifiableGainError,
)
from .experiments import (
    SweepResult,
    run_montecarlo,
    run_sweep,
    write_curvature_csv,
)
from .plot import emit_plot

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lens-crlb",
        description="DoA Cramer-Rao bounds for a lens-embedded antenna array",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress at DEBUG level.")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="Tabulate lens and ULA bounds over sigma_c and phi.")
    sweep.add_argument("config", type=Path, help="Experiment JSON file.")

    mc = sub.add_parser("mc", help="Run Monte Carlo ML campaigns against the bound.")
    mc.add_argument("config", type=Path, help="Experiment JSON file with an 'mc' section.")

    check = sub.add_parser("check", help="Run the randomized invariant suite.")
    check.add_argument("--config", type=Path, default=None, help="Take seed and draws from this file.")
    check.add_argument("--seed", type=int, default=None, help="Random seed for the draws.")
    check.add_argument("--draws", type=int, default=None, help="Number of randomized draws.")

    plot = sub.add_parser("plot", help="Render a sweep CSV as SVG.")
    plot.add_argument("sweep_csv", type=Path)
    plot.add_argument("output", type=Path)

    optimize = sub.add_parser("optimize", help="Find the sigma_c minimizing the mean DoA bound.")
    optimize.add_argument("config", type=Path, help="Experiment JSON file.")
    optimize.add_argument("--sigma-min", type=float, default=0.2)
    optimize.add_argument("--sigma-max", type=float, default=200.0)
    optimize.add_argument("--points", type=int, default=61)
    return parser


def run_sweep_command(config_path: Path) -> int:
    config = load_config(config_path)
    directory = config.output.path
    result = run_sweep(config)
    print(f"[sweep] {len(result.rows)} rows -> {directory / const.SWEEP_FILENAME}")
    if config.output.format == "svg":
        emit_plot(result, directory / const.PLOT_FILENAME)
        print(f"[sweep] plot -> {directory / const.PLOT_FILENAME}")
    return const.EXIT_OK


def run_mc_command(config_path: Path) -> int:
    config = load_config(config_path)
    if config.mc is None:
        raise ConfigError(f"{config_path}: no 'mc' section")
    reports = run_montecarlo(config)
    for report in reports:
        print(
            f"[mc] sigma_c={report.sigma_c:.4g} snr={report.snr_db:g} dB "
            f"var={report.doa_variance:.4e} crlb={report.crlb:.4e} eff={report.efficiency:.3f}"
        )
    print(f"[mc] -> {config.output.path / const.MONTECARLO_FILENAME}")
    return const.EXIT_OK


def run_check_command(
    config_path: Optional[Path], seed: Optional[int], draws: Optional[int]
) -> int:
    settings = (load_config(config_path) if config_path else default_config()).check
    # command-line overrides go through the same validation as the file
    settings = replace(
        settings,
        seed=settings.seed if seed is None else seed,
        draws=settings.draws if draws is None else draws,
    )
    report = run_check(
        seed=settings.seed,
        draws=settings.draws,
        positivity_draws=settings.positivity_draws,
    )
    print(format_check_report(report))
    return const.EXIT_OK if report.passed else const.EXIT_RUNTIME


def run_plot_command(sweep_csv: Path, output: Path) -> int:
    emit_plot(SweepResult.from_csv(sweep_csv), output)
    print(f"[plot] -> {output}")
    return const.EXIT_OK


def run_optimize_command(
    config_path: Path, sigma_min: float, sigma_max: float, points: int
) -> int:
    config = load_config(config_path)
    if not 0 < sigma_min < sigma_max or points < 2:
        raise ConfigError("optimize needs 0 < --sigma-min < --sigma-max and --points >= 2")
    sigmas = np.geomspace(sigma_min, sigma_max, points)
    doas = config.phi_grid.radians()
    template = config.signal.params(0.0)
    scan = curvature_scan(config.array, template, doas, sigmas, config.phi_support)
    path = write_curvature_csv(scan, config.output.path / const.CURVATURE_FILENAME)
    best = optimal_sigma_c(config.array, template, doas, sigmas, config.phi_support)
    print(f"[optimize] scan -> {path}")
    print(f"[optimize] best sigma_c={best.sigma_c:.6g} gain over ULA {best.gain_db:.3f} dB")
    return const.EXIT_OK


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "sweep":
        return run_sweep_command(args.config)
    if args.command == "mc":
        return run_mc_command(args.config)
    if args.command == "check":
        return run_check_command(args.config, args.seed, args.draws)
    if args.command == "plot":
        return run_plot_command(args.sweep_csv, args.output)
    return run_optimize_command(args.config, args.sigma_min, args.sigma_max, args.points)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logger.debug("command %s with %s", args.command, vars(args))

    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return const.EXIT_CONFIG
    except (InvariantViolation, UnidentifiableGainError, MonteCarloTrialError) as exc:
        seed = getattr(exc, "seed", None)
        suffix = f" (seed {seed})" if seed is not None else ""
        print(f"numerical failure: {exc}{suffix}", file=sys.stderr)
        return const.EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''} {exc.strerror or exc}".strip(), file=sys.stderr)
        return const.EXIT_IO
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return const.EXIT_CONFIG


__all__ = ["build_parser", "dispatch", "main"]


if __name__ == "__main__":
    sys.exit(main())
