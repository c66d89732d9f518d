"""Fisher information and Cramer-Rao bounds for the lens-embedded array.

Parameter order is theta = [p, b, phi]. With w_n = A(phi)_nn^2 the moments are

    D = sum w_n,   D1 = sum n w_n,   D2 = sum n^2 w_n,   D_frac = D / (D D2 - D1^2)

and the DoA bound is

    CRLB_lens = D_frac sigma_n^2 / (2 p^2 [4 (N-1)^2 / (pi^2 sigma_c^4) + (kd cos phi)^2]).

The margin D D2 - D1^2 is evaluated as sum_{i<j} w_i w_j (n_i - n_j)^2, a sum of
non-negative terms, so it keeps full relative precision even when nearly all the
power falls on one element.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .array_model import (
    HALF_PI,
    ArrayConfig,
    LensConfig,
    SignalParams,
    amplitude_profile,
    noiseless_mean,
    offset_profile,
    steering_derivative,
    steering_vector,
)
from .constants import FD_STEP_AMPLITUDE, FD_STEP_DOA, FD_STEP_PHASE, PARAMETER_ORDER
from .errors import DomainError, InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DMoments:
    d0: float
    d1: float
    d2: float
    margin: float

    @property
    def d_frac(self) -> float:
        return self.d0 / self.margin


@dataclass(frozen=True)
class FisherMatrix:
    """3x3 information matrix over [p, b, phi]."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (3, 3):
            raise DomainError(f"FisherMatrix needs a 3x3 array, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, key: Tuple[str, str]) -> float:
        row, col = (PARAMETER_ORDER.index(name) for name in key)
        return float(self.entries[row, col])

    def determinant(self) -> float:
        return det3(self.entries)

    def inverse(self) -> np.ndarray:
        return inv3(self.entries)

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.T, rtol=0.0, atol=atol))

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.entries)
        except np.linalg.LinAlgError:
            return False
        return True

    def scaled(self) -> np.ndarray:
        """Unit-diagonal rescaling D^-1/2 J D^-1/2."""
        scale = np.sqrt(np.diag(self.entries))
        return self.entries / np.outer(scale, scale)

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.scaled()))


def det3(m: np.ndarray) -> float:
    """Cofactor expansion along the first row."""
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def inv3(m: np.ndarray) -> np.ndarray:
    """Adjugate divided by the determinant."""
    det = det3(m)
    if det == 0:
        raise InvariantViolation("singular 3x3 matrix")
    adj = np.empty((3, 3))
    for row in range(3):
        for col in range(3):
            minor = np.delete(np.delete(m, col, axis=0), row, axis=1)
            adj[row, col] = (-1) ** (row + col) * (
                minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0]
            )
    return adj / det


def _require_positive(margin: float, cfg: ArrayConfig, lens: LensConfig, doa: float) -> float:
    if not margin > 0:
        raise InvariantViolation(
            f"D*D2 - D1^2 = {margin!r} is not positive "
            f"(N={cfg.n_elements}, sigma_c={lens.sigma_c!r}, doa={doa!r})"
        )
    return margin


def _squared_weights(cfg: ArrayConfig, lens: LensConfig, doa: float) -> np.ndarray:
    offsets = offset_profile(cfg, doa)
    prefactor = lens.p_lens / (2 * math.pi * lens.sigma_c**2)
    return prefactor * np.exp(-2.0 * offsets**2 / lens.sigma_c**2)


def d_moments(cfg: ArrayConfig, lens: LensConfig, doa: float) -> DMoments:
    w = _squared_weights(cfg, lens, doa)
    n = cfg.indices
    half = cfg.half_span
    positive = n[half + 1 :]
    # fold the symmetric index set so D1 is exactly zero when w is even in n
    d1 = float(np.dot(positive, w[half + 1 :] - w[half - 1 :: -1]))
    spread = (n[:, np.newaxis] - n[np.newaxis, :]) ** 2
    margin = 0.5 * float(w @ spread @ w)
    return DMoments(d0=float(w.sum()), d1=d1, d2=float(np.dot(n**2, w)), margin=margin)


def positivity_margin(cfg: ArrayConfig, lens: LensConfig, doa: float) -> float:
    """D D2 - D1^2, which must be strictly positive for every valid input."""
    return _require_positive(d_moments(cfg, lens, doa).margin, cfg, lens, doa)


def _lens_term(cfg: ArrayConfig, lens: LensConfig) -> float:
    # 4 (N-1)^2 / (pi^2 sigma_c^4), information carried by the sliding amplitude
    return 4 * (cfg.n_elements - 1) ** 2 / (math.pi**2 * lens.sigma_c**4)


def _phase_term(cfg: ArrayConfig, doa: float) -> float:
    return (cfg.kd_product * math.cos(doa)) ** 2


def fisher_matrix(cfg: ArrayConfig, lens: LensConfig, params: SignalParams) -> FisherMatrix:
    """Assemble J = -E[d^2 g / d theta_i d theta_j] from its closed-form entries."""
    p, noise, doa = params.amplitude, params.noise_variance, params.doa
    s = steering_vector(cfg, doa)
    s1 = steering_derivative(cfg, doa)
    a2 = amplitude_profile(cfg, lens, doa) ** 2
    c = offset_profile(cfg, doa)

    s_a2_s = np.vdot(s, a2 * s).real
    s_c_a2_s = np.vdot(s, c * a2 * s).real
    s_c2_a2_s = np.vdot(s, c**2 * a2 * s).real
    s1_a2_s1 = np.vdot(s1, a2 * s1).real
    # s^H A^2 s1 is purely imaginary, so j * (.) is real
    s_a2_s1 = np.vdot(s, a2 * s1)

    j_pp = 2 / noise * s_a2_s
    j_bb = 2 * p**2 / noise * s_a2_s
    j_phiphi = 2 * p**2 / noise * (_lens_term(cfg, lens) * s_c2_a2_s + s1_a2_s1)
    j_pb = 0.0
    j_bphi = -(2j * p**2 / noise * s_a2_s1).real
    j_phip = -4 * p * (cfg.n_elements - 1) / (math.pi * noise * lens.sigma_c**2) * s_c_a2_s

    return FisherMatrix(
        np.array(
            [
                [j_pp, j_pb, j_phip],
                [j_pb, j_bb, j_bphi],
                [j_phip, j_bphi, j_phiphi],
            ]
        )
    )


def fisher_numeric(cfg: ArrayConfig, lens: LensConfig, params: SignalParams) -> FisherMatrix:
    """Finite-difference oracle: J_ij = (2 / sigma_n^2) Re[dv_i^H dv_j]."""
    theta = np.array([params.amplitude, params.phase, params.doa])
    steps = (FD_STEP_AMPLITUDE * max(params.amplitude, 1.0), FD_STEP_PHASE, FD_STEP_DOA)

    def mean_at(values: np.ndarray) -> np.ndarray:
        p, b, doa = values
        if abs(doa) >= HALF_PI:
            raise DomainError(f"finite-difference step leaves the domain at doa={doa!r}")
        shifted = SignalParams(
            amplitude=p,
            phase=b,
            doa=doa,
            noise_variance=params.noise_variance,
            lens_phase=params.lens_phase,
        )
        return noiseless_mean(cfg, lens, shifted)

    grads = []
    for index, step in enumerate(steps):
        delta = np.zeros(3)
        delta[index] = step
        grads.append((mean_at(theta + delta) - mean_at(theta - delta)) / (2 * step))
    jac = np.stack(grads, axis=1)
    return FisherMatrix(2 / params.noise_variance * (jac.conj().T @ jac).real)


def fisher_determinant_closed(cfg: ArrayConfig, lens: LensConfig, params: SignalParams) -> float:
    """det J in closed form.

    The printed form carries the factor (D1^2 - D D2), which is negative; the
    assembled matrix is positive definite, so the factor used here is
    (D D2 - D1^2) and the result matches det of :func:`fisher_matrix`.
    """
    moments = d_moments(cfg, lens, params.doa)
    margin = _require_positive(moments.margin, cfg, lens, params.doa)
    p, noise = params.amplitude, params.noise_variance
    return (
        8
        * p**4
        / noise**3
        * moments.d0
        * margin
        * (_lens_term(cfg, lens) + _phase_term(cfg, params.doa))
    )


def leading_minors(
    cfg: ArrayConfig, lens: LensConfig, params: SignalParams
) -> Tuple[float, float, float]:
    """Leading principal minors of J, each in closed form."""
    moments = d_moments(cfg, lens, params.doa)
    j_pp = 2 / params.noise_variance * moments.d0
    j_bb = 2 * params.amplitude**2 / params.noise_variance * moments.d0
    return j_pp, j_pp * j_bb, fisher_determinant_closed(cfg, lens, params)


def crlb_lens(cfg: ArrayConfig, lens: LensConfig, params: SignalParams) -> float:
    """[J^-1]_phiphi with p and b treated as nuisance parameters."""
    moments = d_moments(cfg, lens, params.doa)
    _require_positive(moments.margin, cfg, lens, params.doa)
    information = _lens_term(cfg, lens) + _phase_term(cfg, params.doa)
    return moments.d_frac * params.noise_variance / (2 * params.amplitude**2 * information)


def crlb_ula(cfg: ArrayConfig, params: SignalParams) -> float:
    """Bound for the bare array (A = I)."""
    n = cfg.n_elements
    phase = _phase_term(cfg, params.doa)
    if phase == 0:
        raise DomainError(f"ULA bound diverges at doa={params.doa!r}")
    return 6 * params.noise_variance / (params.amplitude**2 * n * (n**2 - 1) * phase)


def crlb_lens_large_sigma(cfg: ArrayConfig, params: SignalParams) -> float:
    """Limit of :func:`crlb_lens` as sigma_c grows: the lens term vanishes,
    D1 -> 0 and D2 -> N (N^2 - 1) / 12, which is the ULA bound."""
    return crlb_ula(cfg, params)


__all__ = [
    "DMoments",
    "FisherMatrix",
    "crlb_lens",
    "crlb_lens_large_sigma",
    "crlb_ula",
    "d_moments",
    "det3",
    "fisher_determinant_closed",
    "fisher_matrix",
    "fisher_numeric",
    "inv3",
    "leading_minors",
    "positivity_margin",
]
