"""Search for the lens curvature that minimizes the DoA bound over a field of view."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .array_model import ArrayConfig, LensConfig, SignalParams
from .constants import DEFAULT_PHI_SUPPORT
from .errors import DomainError
from .fisher import crlb_lens, crlb_ula

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvaturePoint:
    sigma_c: float
    mean_crlb_lens: float
    mean_crlb_ula: float

    @property
    def gain_db(self) -> float:
        """How far the lens bound sits below the ULA bound, in dB."""
        return 10 * math.log10(self.mean_crlb_ula / self.mean_crlb_lens)


def evaluate_curvature(
    cfg: ArrayConfig,
    params: SignalParams,
    doas: Sequence[float],
    sigma_c: float,
    phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT,
) -> CurvaturePoint:
    lens = LensConfig.normalized(cfg, sigma_c, phi_support)
    lens_bounds = [crlb_lens(cfg, lens, params.with_doa(float(doa))) for doa in doas]
    ula_bounds = [crlb_ula(cfg, params.with_doa(float(doa))) for doa in doas]
    return CurvaturePoint(
        sigma_c=float(sigma_c),
        mean_crlb_lens=float(np.mean(lens_bounds)),
        mean_crlb_ula=float(np.mean(ula_bounds)),
    )


def curvature_scan(
    cfg: ArrayConfig,
    params: SignalParams,
    doas: Sequence[float],
    sigma_grid: Sequence[float],
    phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT,
) -> List[CurvaturePoint]:
    if len(doas) == 0 or len(sigma_grid) == 0:
        raise DomainError("curvature scan needs at least one doa and one sigma_c")
    return [evaluate_curvature(cfg, params, doas, s, phi_support) for s in sigma_grid]


def optimal_sigma_c(
    cfg: ArrayConfig,
    params: SignalParams,
    doas: Sequence[float],
    sigma_grid: Sequence[float],
    phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT,
) -> CurvaturePoint:
    """Best sigma_c: grid scan in log sigma_c, then a bounded scalar search
    between the neighbours of the best grid point."""
    grid = sorted(float(s) for s in sigma_grid)
    scan = curvature_scan(cfg, params, doas, grid, phi_support)
    best = int(np.argmin([point.mean_crlb_lens for point in scan]))
    low = math.log(grid[max(best - 1, 0)])
    high = math.log(grid[min(best + 1, len(grid) - 1)])
    if high <= low:
        return scan[best]

    def cost(log_sigma: float) -> float:
        return evaluate_curvature(cfg, params, doas, math.exp(log_sigma), phi_support).mean_crlb_lens

    result = minimize_scalar(cost, bounds=(low, high), method="bounded")
    refined = evaluate_curvature(cfg, params, doas, math.exp(result.x), phi_support)
    logger.info("optimal sigma_c=%.6g (gain %.3f dB)", refined.sigma_c, refined.gain_db)
    return refined if refined.mean_crlb_lens <= scan[best].mean_crlb_lens else scan[best]


__all__ = ["CurvaturePoint", "curvature_scan", "evaluate_curvature", "optimal_sigma_c"]
