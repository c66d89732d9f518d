"""Array geometry, lens amplitude model and steering vectors.

Element indices run from -(N-1)/2 to (N-1)/2 so the phase reference sits at the
centre of the array. The lens shapes the received amplitude across elements as a
sampled Gaussian whose mean slides with the direction of arrival:

    A(phi)_nn = sqrt(p_lens) / sqrt(2 pi sigma_c^2) * exp(-(n + (N-1) phi / pi)^2 / sigma_c^2)

The exponent uses sigma_c^2 without the usual factor 2. The Fisher moments square
this profile, which is where exp(-2 (.)^2 / sigma_c^2) comes from.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .constants import DEFAULT_LENS_PHASE, DEFAULT_PHI_SUPPORT, QUADRATURE_NODES
from .errors import DomainError

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2


def _check_doa(doa: float) -> None:
    if not math.isfinite(doa) or abs(doa) >= HALF_PI:
        raise DomainError(f"direction of arrival must satisfy |doa| < pi/2, got {doa!r}")


def _check_support(phi_support: Tuple[float, float]) -> Tuple[float, float]:
    try:
        low, high = (float(v) for v in phi_support)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"phi_support must be a (low, high) pair, got {phi_support!r}") from exc
    if not low < high:
        raise DomainError(f"phi_support is empty or degenerate: [{low}, {high}]")
    if low <= -HALF_PI or high >= HALF_PI:
        raise DomainError(f"phi_support must lie inside (-pi/2, pi/2), got [{low}, {high}]")
    return low, high


@dataclass(frozen=True)
class ArrayConfig:
    """Odd-sized linear array with spacing given in carrier wavelengths."""

    n_elements: int
    spacing_wavelengths: float

    def __post_init__(self) -> None:
        if isinstance(self.n_elements, bool) or not isinstance(self.n_elements, (int, np.integer)):
            raise DomainError(f"n_elements must be an integer, got {self.n_elements!r}")
        if self.n_elements < 3 or self.n_elements % 2 == 0:
            raise DomainError(f"n_elements must be odd and >= 3, got {self.n_elements}")
        if not math.isfinite(self.spacing_wavelengths) or self.spacing_wavelengths <= 0:
            raise DomainError(
                f"spacing_wavelengths must be positive, got {self.spacing_wavelengths!r}"
            )

    @property
    def kd_product(self) -> float:
        return 2 * math.pi * self.spacing_wavelengths

    @property
    def half_span(self) -> int:
        return (self.n_elements - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        """Element indices -(N-1)/2 .. (N-1)/2 as floats."""
        return np.arange(-self.half_span, self.half_span + 1, dtype=float)

    def mean_offset(self, doa: float) -> float:
        """The term (N-1) phi / pi shared by the amplitude and offset profiles."""
        return (self.n_elements - 1) * doa / math.pi


@dataclass(frozen=True)
class LensConfig:
    """Gaussian lens profile parameters.

    Build instances through :meth:`normalized` unless a specific ``p_lens`` is
    wanted; the constructor only checks signs and the support interval.
    """

    sigma_c: float
    p_lens: float
    phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT

    def __post_init__(self) -> None:
        if not math.isfinite(self.sigma_c) or self.sigma_c <= 0:
            raise DomainError(f"sigma_c must be positive, got {self.sigma_c!r}")
        if not math.isfinite(self.p_lens) or self.p_lens <= 0:
            raise DomainError(f"p_lens must be positive, got {self.p_lens!r}")
        object.__setattr__(self, "phi_support", _check_support(self.phi_support))

    @classmethod
    def normalized(
        cls,
        cfg: ArrayConfig,
        sigma_c: float,
        phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT,
    ) -> "LensConfig":
        return cls(
            sigma_c=sigma_c,
            p_lens=normalize_power(cfg, sigma_c, phi_support),
            phi_support=phi_support,
        )


@dataclass(frozen=True)
class SignalParams:
    """Deterministic unknowns of the single-snapshot model plus the noise level."""

    amplitude: float
    phase: float
    doa: float
    noise_variance: float
    lens_phase: float = DEFAULT_LENS_PHASE

    def __post_init__(self) -> None:
        if not math.isfinite(self.amplitude) or self.amplitude <= 0:
            raise DomainError(f"amplitude must be positive, got {self.amplitude!r}")
        if not math.isfinite(self.noise_variance) or self.noise_variance <= 0:
            raise DomainError(f"noise_variance must be positive, got {self.noise_variance!r}")
        if not math.isfinite(self.phase) or not math.isfinite(self.lens_phase):
            raise DomainError("phase and lens_phase must be finite")
        _check_doa(self.doa)

    @property
    def snr_db(self) -> float:
        """Per-element SNR p^2 / sigma_n^2 in decibels."""
        return 10 * math.log10(self.amplitude**2 / self.noise_variance)

    def with_doa(self, doa: float) -> "SignalParams":
        return replace(self, doa=doa)


def noise_variance_for_snr(amplitude: float, snr_db: float) -> float:
    return amplitude**2 / 10 ** (snr_db / 10)


def steering_vector(cfg: ArrayConfig, doa: float) -> np.ndarray:
    _check_doa(doa)
    return np.exp(1j * cfg.kd_product * math.sin(doa) * cfg.indices)


def steering_derivative(cfg: ArrayConfig, doa: float) -> np.ndarray:
    """Elementwise d s / d phi = j kd cos(phi) n z^n."""
    s = steering_vector(cfg, doa)
    return 1j * cfg.kd_product * math.cos(doa) * cfg.indices * s


def offset_profile(cfg: ArrayConfig, doa: float) -> np.ndarray:
    return cfg.indices + cfg.mean_offset(doa)


def offset_matrix(cfg: ArrayConfig, doa: float) -> np.ndarray:
    return np.diag(offset_profile(cfg, doa))


def _squared_profile_sums(cfg: ArrayConfig, sigma_c: float, doas: np.ndarray) -> np.ndarray:
    # sum_n A(phi)_nn^2 with p_lens = 1, one value per entry of doas
    offsets = cfg.indices[np.newaxis, :] + (cfg.n_elements - 1) * doas[:, np.newaxis] / math.pi
    gauss = np.exp(-2.0 * offsets**2 / sigma_c**2)
    return gauss.sum(axis=1) / (2 * math.pi * sigma_c**2)


def normalize_power(
    cfg: ArrayConfig,
    sigma_c: float,
    phi_support: Tuple[float, float] = DEFAULT_PHI_SUPPORT,
) -> float:
    """Return p_lens making the phi-averaged received power equal to N.

    phi is uniform on ``phi_support``; the average is a 256-node Gauss-Legendre rule.
    """
    if not math.isfinite(sigma_c) or sigma_c <= 0:
        raise DomainError(f"sigma_c must be positive, got {sigma_c!r}")
    low, high = _check_support(phi_support)

    nodes, weights = np.polynomial.legendre.leggauss(QUADRATURE_NODES)
    half, mid = (high - low) / 2, (high + low) / 2
    sums = _squared_profile_sums(cfg, sigma_c, mid + half * nodes)
    average = 0.5 * float(np.dot(weights, sums))
    if not average > 0:
        raise DomainError(f"received power underflows for sigma_c={sigma_c}")

    p_lens = cfg.n_elements / average
    logger.debug("p_lens=%.6g for N=%d sigma_c=%.6g", p_lens, cfg.n_elements, sigma_c)
    return p_lens


def amplitude_profile(cfg: ArrayConfig, lens: LensConfig, doa: float) -> np.ndarray:
    offsets = offset_profile(cfg, doa)
    scale = math.sqrt(lens.p_lens) / math.sqrt(2 * math.pi * lens.sigma_c**2)
    return scale * np.exp(-(offsets**2) / lens.sigma_c**2)


def amplitude_matrix(cfg: ArrayConfig, lens: LensConfig, doa: float) -> np.ndarray:
    return np.diag(amplitude_profile(cfg, lens, doa))


def received_power_share(
    cfg: ArrayConfig, lens: LensConfig, doa: float, elements: int = 2
) -> float:
    """Fraction of received power landing on the ``elements`` strongest antennas."""
    if not 1 <= elements <= cfg.n_elements:
        raise DomainError(f"elements must be in [1, {cfg.n_elements}], got {elements}")
    power = np.sort(amplitude_profile(cfg, lens, doa) ** 2)[::-1]
    return float(power[:elements].sum() / power.sum())


def noiseless_mean(cfg: ArrayConfig, lens: LensConfig, params: SignalParams) -> np.ndarray:
    """v = p A(phi) e^{j(b + f)} s(phi), the mean of the received snapshot."""
    gain = params.amplitude * np.exp(1j * (params.phase + params.lens_phase))
    return gain * amplitude_profile(cfg, lens, params.doa) * steering_vector(cfg, params.doa)


__all__ = [
    "ArrayConfig",
    "LensConfig",
    "SignalParams",
    "amplitude_matrix",
    "amplitude_profile",
    "noise_variance_for_snr",
    "noiseless_mean",
    "normalize_power",
    "offset_matrix",
    "offset_profile",
    "received_power_share",
    "steering_derivative",
    "steering_vector",
]
