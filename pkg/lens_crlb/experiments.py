"""Bound sweeps and Monte Carlo campaigns driven by an ExperimentConfig, with CSV I/O."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import constants as const
from .array_model import ArrayConfig, LensConfig, SignalParams, noise_variance_for_snr
from .config import ExperimentConfig, SignalConfig
from .curvature import CurvaturePoint
from .errors import ConfigError, DomainError
from .fisher import crlb_lens, crlb_ula, d_moments
from .simulate import McReport, monte_carlo_variance
from .workers import ordered_map

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class SweepRow(NamedTuple):
    phi_deg: float
    sigma_c: float
    crlb_lens: float
    crlb_ula: float
    d0: float
    d1: float
    d2: float
    margin: float


@dataclass(frozen=True)
class SweepResult:
    rows: List[SweepRow]

    @property
    def sigma_c_values(self) -> List[float]:
        """Distinct sigma_c values in row order."""
        seen: List[float] = []
        for row in self.rows:
            if row.sigma_c not in seen:
                seen.append(row.sigma_c)
        return seen

    def for_sigma(self, sigma_c: float) -> List[SweepRow]:
        return [row for row in self.rows if row.sigma_c == sigma_c]

    def column(self, name: str, sigma_c: Optional[float] = None) -> np.ndarray:
        rows = self.rows if sigma_c is None else self.for_sigma(sigma_c)
        return np.array([getattr(row, name) for row in rows])

    @classmethod
    def from_csv(cls, path: PathLike) -> "SweepResult":
        table = np.atleast_1d(
            np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8")
        )
        if tuple(table.dtype.names or ()) != const.SWEEP_COLUMNS:
            raise DomainError(f"{path}: header does not match {','.join(const.SWEEP_COLUMNS)}")
        return cls([SweepRow(*(float(v) for v in record)) for record in table])


def _fmt(value: float) -> str:
    return format(value, f".{const.SIGNIFICANT_DIGITS}g")


def _write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %s", path)
    return path


def write_sweep_csv(result: SweepResult, path: PathLike) -> Path:
    return _write_csv(
        path, const.SWEEP_COLUMNS, ([_fmt(value) for value in row] for row in result.rows)
    )


def write_montecarlo_csv(reports: Sequence[McReport], path: PathLike) -> Path:
    rows = (
        [
            _fmt(r.sigma_c),
            _fmt(r.snr_db),
            str(r.trials),
            _fmt(r.doa_bias),
            _fmt(r.doa_variance),
            _fmt(r.crlb),
            _fmt(r.efficiency),
        ]
        for r in reports
    )
    return _write_csv(path, const.MONTECARLO_COLUMNS, rows)


def write_curvature_csv(points: Sequence[CurvaturePoint], path: PathLike) -> Path:
    rows = (
        [_fmt(p.sigma_c), _fmt(p.mean_crlb_lens), _fmt(p.mean_crlb_ula), _fmt(p.gain_db)]
        for p in points
    )
    return _write_csv(path, const.CURVATURE_COLUMNS, rows)


def sweep_row(
    cfg: ArrayConfig, lens: LensConfig, signal: SignalConfig, phi_deg: float
) -> SweepRow:
    params = signal.params(math.radians(phi_deg))
    moments = d_moments(cfg, lens, params.doa)
    return SweepRow(
        phi_deg=float(phi_deg),
        sigma_c=lens.sigma_c,
        crlb_lens=crlb_lens(cfg, lens, params),
        crlb_ula=crlb_ula(cfg, params),
        d0=moments.d0,
        d1=moments.d1,
        d2=moments.d2,
        margin=moments.margin,
    )


def compute_sweep(config: ExperimentConfig, workers: Optional[int] = None) -> SweepResult:
    """Both bounds and diagnostics for every (sigma_c, phi); sigma_c outer, phi ascending."""
    phis = sorted(float(phi) for phi in config.phi_grid.degrees())
    rows: List[SweepRow] = []
    for sigma_c in config.sigma_c_list:
        lens = config.lens(sigma_c)
        logger.debug("sweep sigma_c=%.6g p_lens=%.6g over %d angles", sigma_c, lens.p_lens, len(phis))
        task = partial(sweep_row, config.array, lens, config.signal)
        rows.extend(ordered_map(task, phis, workers=workers))
    return SweepResult(rows)


def run_sweep(
    config: ExperimentConfig, path: Optional[PathLike] = None, workers: Optional[int] = None
) -> SweepResult:
    result = compute_sweep(config, workers=workers)
    write_sweep_csv(result, path or config.output.path / const.SWEEP_FILENAME)
    return result


def compute_montecarlo(
    config: ExperimentConfig, workers: Optional[int] = None
) -> List[McReport]:
    """One campaign per (sigma_c, snr_db); every campaign shares the master seed."""
    if config.mc is None:
        raise ConfigError("configuration has no 'mc' section")
    mc = config.mc
    doa = math.radians(mc.doa_deg)
    reports = []
    for sigma_c in config.sigma_c_list:
        lens = config.lens(sigma_c)
        for snr_db in mc.snr_list_db:
            noise = noise_variance_for_snr(config.signal.amplitude, snr_db)
            params: SignalParams = config.signal.params(doa, noise_variance=noise)
            reports.append(
                monte_carlo_variance(
                    config.array,
                    lens,
                    params,
                    trials=mc.trials,
                    master_seed=mc.master_seed,
                    search=config.search,
                    workers=workers,
                )
            )
    return reports


def run_montecarlo(
    config: ExperimentConfig, path: Optional[PathLike] = None, workers: Optional[int] = None
) -> List[McReport]:
    reports = compute_montecarlo(config, workers=workers)
    write_montecarlo_csv(reports, path or config.output.path / const.MONTECARLO_FILENAME)
    return reports


__all__ = [
    "SweepResult",
    "SweepRow",
    "compute_montecarlo",
    "compute_sweep",
    "run_montecarlo",
    "run_sweep",
    "sweep_row",
    "write_curvature_csv",
    "write_montecarlo_csv",
    "write_sweep_csv",
]
