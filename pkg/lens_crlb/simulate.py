"""Snapshot synthesis, concentrated ML estimation and Monte Carlo campaigns."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .array_model import (
    HALF_PI,
    ArrayConfig,
    LensConfig,
    SignalParams,
    amplitude_profile,
    noiseless_mean,
    steering_vector,
)
from .constants import (
    DEFAULT_GRID_POINTS,
    DEFAULT_LENS_PHASE,
    DEFAULT_REFINE_ITERS,
    MIN_GRID_POINTS,
    MIN_TRIALS,
    SEARCH_MARGIN,
)
from .errors import DomainError, LensCrlbError, MonteCarloTrialError, UnidentifiableGainError
from .fisher import crlb_lens
from .workers import ordered_map

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """splitmix64 finalizer applied to master_seed + index."""
    z = (master_seed + index + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SearchSettings:
    grid_points: int = DEFAULT_GRID_POINTS
    refine_iters: int = DEFAULT_REFINE_ITERS

    def __post_init__(self) -> None:
        if self.grid_points < MIN_GRID_POINTS:
            raise DomainError(
                f"grid_points must be >= {MIN_GRID_POINTS}, got {self.grid_points}"
            )
        if self.refine_iters < 0:
            raise DomainError(f"refine_iters must be >= 0, got {self.refine_iters}")

    def grid(self) -> np.ndarray:
        edge = HALF_PI - SEARCH_MARGIN
        return np.linspace(-edge, edge, self.grid_points)


@dataclass(frozen=True)
class Snapshot:
    samples: np.ndarray
    truth: SignalParams
    seed: int


@dataclass(frozen=True)
class Estimate:
    doa: float
    amplitude: float
    phase: float


@dataclass(frozen=True)
class McReport:
    sigma_c: float
    snr_db: float
    trials: int
    doa_bias: float
    doa_variance: float
    crlb: float

    @property
    def efficiency(self) -> float:
        if self.doa_variance == 0:
            return math.inf
        return self.crlb / self.doa_variance

    def guard_band(self) -> float:
        """Lower limit for doa_variance allowed by Monte Carlo error (3 sigma)."""
        return self.crlb * (1 - 3 * math.sqrt(2 / self.trials))


def synthesize_snapshot(
    cfg: ArrayConfig, lens: LensConfig, params: SignalParams, seed: int
) -> Snapshot:
    """x = v + n with circular complex Gaussian noise of per-element variance sigma_n^2."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    noise = rng.standard_normal((2, cfg.n_elements))
    scale = math.sqrt(params.noise_variance / 2)
    samples = noiseless_mean(cfg, lens, params) + scale * (noise[0] + 1j * noise[1])
    return Snapshot(samples=samples, truth=params, seed=seed)


def _wrap_phase(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


class ConcentratedLikelihood:
    """|u^H x|^2 / (u^H u) with u(phi) = A(phi) s(phi), the gain maximized out."""

    def __init__(self, cfg: ArrayConfig, lens: LensConfig) -> None:
        self.cfg = cfg
        self.lens = lens

    def response(self, doa: float) -> np.ndarray:
        return amplitude_profile(self.cfg, self.lens, doa) * steering_vector(self.cfg, doa)

    def response_grid(self, doas: np.ndarray) -> np.ndarray:
        return np.stack([self.response(float(doa)) for doa in doas])

    def __call__(self, x: np.ndarray, doa: float) -> float:
        u = self.response(doa)
        return abs(np.vdot(u, x)) ** 2 / np.vdot(u, u).real

    def gain(self, x: np.ndarray, doa: float) -> complex:
        u = self.response(doa)
        return complex(np.vdot(u, x) / np.vdot(u, u).real)


class MLEstimator:
    """Grid argmax of the concentrated likelihood refined by golden-section search.

    The grid responses are computed once, so one estimator instance can be reused
    across many snapshots of the same array and lens. ``lens_phase`` is the known
    constant f(sigma_c) removed from the gain phase.
    """

    def __init__(
        self,
        cfg: ArrayConfig,
        lens: LensConfig,
        search: Optional[SearchSettings] = None,
        lens_phase: float = DEFAULT_LENS_PHASE,
    ) -> None:
        self.search = search or SearchSettings()
        self.lens_phase = lens_phase
        self.likelihood = ConcentratedLikelihood(cfg, lens)
        self.grid = self.search.grid()
        responses = self.likelihood.response_grid(self.grid)
        self._responses = responses
        self._norms = np.einsum("ij,ij->i", responses.conj(), responses).real

    def _refine(self, x: np.ndarray, index: int) -> float:
        grid = self.grid
        if self.search.refine_iters == 0 or index in (0, len(grid) - 1):
            return float(grid[index])
        bracket = (float(grid[index - 1]), float(grid[index]), float(grid[index + 1]))

        def cost(doa: float) -> float:
            return -self.likelihood(x, doa)

        try:
            result = minimize_scalar(
                cost,
                bracket=bracket,
                method="golden",
                options={"xtol": 0.0, "maxiter": self.search.refine_iters},
            )
        except ValueError:
            # plateau across the bracket; the grid point is as good as any
            logger.debug("golden refinement skipped at grid index %d", index)
            return float(grid[index])
        return float(result.x)

    def estimate(self, snapshot: Snapshot) -> Estimate:
        x = snapshot.samples
        if not np.any(x):
            raise UnidentifiableGainError("all-zero snapshot: the complex gain is unidentifiable")
        projections = np.abs(self._responses.conj() @ x) ** 2 / self._norms
        doa = self._refine(x, int(np.argmax(projections)))
        gain = self.likelihood.gain(x, doa)
        return Estimate(
            doa=doa,
            amplitude=abs(gain),
            phase=_wrap_phase(np.angle(gain) - self.lens_phase),
        )


def ml_estimate(
    snapshot: Snapshot,
    cfg: ArrayConfig,
    lens: LensConfig,
    search: Optional[SearchSettings] = None,
    lens_phase: float = DEFAULT_LENS_PHASE,
) -> Tuple[float, float, float]:
    """Return (doa_hat, p_hat, b_hat) for one snapshot."""
    est = MLEstimator(cfg, lens, search, lens_phase).estimate(snapshot)
    return est.doa, est.amplitude, est.phase


def _run_trial(
    estimator: MLEstimator,
    cfg: ArrayConfig,
    lens: LensConfig,
    params: SignalParams,
    seed: int,
) -> float:
    try:
        snapshot = synthesize_snapshot(cfg, lens, params, seed)
        return estimator.estimate(snapshot).doa
    except LensCrlbError as exc:
        raise MonteCarloTrialError(f"trial with seed {seed} failed: {exc}", seed=seed) from exc


def monte_carlo_variance(
    cfg: ArrayConfig,
    lens: LensConfig,
    params: SignalParams,
    trials: int,
    master_seed: int,
    search: Optional[SearchSettings] = None,
    workers: Optional[int] = None,
) -> McReport:
    """Bias and variance of the ML DoA estimate over seeded independent trials."""
    if trials < MIN_TRIALS:
        raise DomainError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    estimator = MLEstimator(cfg, lens, search, params.lens_phase)
    seeds = [derive_seed(master_seed, index) for index in range(trials)]
    logger.info(
        "Monte Carlo: %d trials, sigma_c=%.6g, snr=%.3g dB",
        trials,
        lens.sigma_c,
        params.snr_db,
    )

    run = partial(_run_trial, estimator, cfg, lens, params)
    estimates = np.array(ordered_map(run, seeds, workers=workers))

    errors = estimates - params.doa
    return McReport(
        sigma_c=lens.sigma_c,
        snr_db=params.snr_db,
        trials=trials,
        doa_bias=float(errors.mean()),
        doa_variance=float(estimates.var(ddof=1)),
        crlb=crlb_lens(cfg, lens, params),
    )


__all__ = [
    "ConcentratedLikelihood",
    "Estimate",
    "MLEstimator",
    "McReport",
    "SearchSettings",
    "Snapshot",
    "derive_seed",
    "ml_estimate",
    "monte_carlo_variance",
    "synthesize_snapshot",
]
