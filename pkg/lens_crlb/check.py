"""Randomized self-test of the closed-form Fisher results.

Every draw is checked against the finite-difference oracle, the assembled
determinant and inverse, the closed-form leading minors, phi -> -phi symmetry and
lens-phase invariance. A separate sweep checks D D2 - D1^2 > 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

import numpy as np

from . import constants as const
from .array_model import (
    ArrayConfig,
    LensConfig,
    SignalParams,
    noise_variance_for_snr,
    noiseless_mean,
)
from .errors import LensCrlbError
from .fisher import (
    FisherMatrix,
    crlb_lens,
    crlb_ula,
    fisher_determinant_closed,
    fisher_matrix,
    fisher_numeric,
    inv3,
    leading_minors,
    positivity_margin,
)

logger = logging.getLogger(__name__)

DRAW_LIMITS = {
    "n_elements": (3, 41),
    "sigma_c": (0.2, 200.0),
    "doa_deg": (-75.0, 75.0),
    "snr_db": (-10.0, 30.0),
    "amplitude": (0.5, 2.0),
    "spacing_wavelengths": (0.05, 0.5),
}


@dataclass(frozen=True)
class Case:
    cfg: ArrayConfig
    lens: LensConfig
    params: SignalParams

    def describe(self) -> Dict[str, float]:
        return {
            "n_elements": self.cfg.n_elements,
            "spacing_wavelengths": self.cfg.spacing_wavelengths,
            "sigma_c": self.lens.sigma_c,
            "p_lens": self.lens.p_lens,
            "amplitude": self.params.amplitude,
            "phase": self.params.phase,
            "lens_phase": self.params.lens_phase,
            "doa": self.params.doa,
            "noise_variance": self.params.noise_variance,
        }


@dataclass
class CheckOutcome:
    name: str
    cases: int = 0
    failures: int = 0
    widened: int = 0
    unverifiable: int = 0
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, detail: Callable[[], str]) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail()

    def skip(self) -> None:
        """Count a draw the identity cannot be verified on, neither passed nor failed."""
        self.unverifiable += 1


@dataclass
class CheckReport:
    seed: int
    draws: int
    outcomes: List[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(outcome.passed for outcome in self.outcomes)


def _odd_sizes() -> np.ndarray:
    low, high = DRAW_LIMITS["n_elements"]
    return np.arange(low, high + 1, 2)


def _log_uniform(rng: np.random.Generator, low: float, high: float) -> float:
    return float(math.exp(rng.uniform(math.log(low), math.log(high))))


def draw_case(rng: np.random.Generator) -> Case:
    cfg = ArrayConfig(
        n_elements=int(rng.choice(_odd_sizes())),
        spacing_wavelengths=float(rng.uniform(*DRAW_LIMITS["spacing_wavelengths"])),
    )
    lens = LensConfig.normalized(cfg, _log_uniform(rng, *DRAW_LIMITS["sigma_c"]))
    amplitude = float(rng.uniform(*DRAW_LIMITS["amplitude"]))
    snr_db = float(rng.uniform(*DRAW_LIMITS["snr_db"]))
    params = SignalParams(
        amplitude=amplitude,
        phase=float(rng.uniform(-math.pi, math.pi)),
        doa=math.radians(float(rng.uniform(*DRAW_LIMITS["doa_deg"]))),
        noise_variance=noise_variance_for_snr(amplitude, snr_db),
        lens_phase=float(rng.uniform(-math.pi, math.pi)),
    )
    return Case(cfg, lens, params)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


def identity_tolerance(fisher: FisherMatrix) -> Optional[float]:
    """Relative tolerance for the closed-form identities, or None when J is too
    ill-conditioned for them to be verified in double precision."""
    tolerance = max(const.IDENTITY_RTOL, const.CONDITION_SLACK * fisher.condition_number())
    if tolerance > const.IDENTITY_RTOL_CAP:
        return None
    return tolerance


def rephased_fisher(case: Case, shift: float) -> FisherMatrix:
    """Finite-difference J with the lens phase moved by ``shift``.

    v is linear in p and in e^{jb}, so only the phi column needs differencing.
    """
    cfg, lens = case.cfg, case.lens
    params = replace(case.params, lens_phase=case.params.lens_phase + shift)
    step = const.FD_STEP_DOA
    mean = noiseless_mean(cfg, lens, params)
    d_doa = (
        noiseless_mean(cfg, lens, params.with_doa(params.doa + step))
        - noiseless_mean(cfg, lens, params.with_doa(params.doa - step))
    ) / (2 * step)
    jac = np.stack([mean / params.amplitude, 1j * mean, d_doa], axis=1)
    return FisherMatrix(2 / params.noise_variance * (jac.conj().T @ jac).real)


def scaled_mismatch(analytic: FisherMatrix, numeric: FisherMatrix) -> float:
    """Largest |J_a - J_n| measured in units of sqrt(J_ii J_jj)."""
    diag = np.sqrt(np.abs(np.diag(analytic.entries)))
    return float(np.max(np.abs(analytic.entries - numeric.entries) / np.outer(diag, diag)))


def _detail(case: Case, message: str) -> str:
    inputs = ", ".join(f"{key}={value!r}" for key, value in case.describe().items())
    return f"{message}\n    inputs: {inputs}"


def check_case(case: Case, outcomes: Dict[str, CheckOutcome]) -> None:
    cfg, lens, params = case.cfg, case.lens, case.params
    analytic = fisher_matrix(cfg, lens, params)
    numeric = fisher_numeric(cfg, lens, params)

    mismatch = scaled_mismatch(analytic, numeric)
    outcomes["fisher_vs_numeric"].record(
        mismatch <= const.NUMERIC_RTOL and analytic.is_symmetric(),
        lambda: _detail(
            case,
            f"entrywise mismatch {mismatch:.3e} > {const.NUMERIC_RTOL:.0e}\n"
            f"    analytic:\n{analytic.entries}\n    numeric:\n{numeric.entries}",
        ),
    )

    tolerance = identity_tolerance(analytic)
    for name, closed, assembled in (
        ("determinant", fisher_determinant_closed(cfg, lens, params), analytic.determinant()),
        ("inverse_entry", crlb_lens(cfg, lens, params), inv3(analytic.entries)[2, 2]),
    ):
        error = _relative(closed, assembled)
        outcome = outcomes[name]
        if tolerance is None:
            outcome.skip()
            continue
        if tolerance > const.IDENTITY_RTOL:
            outcome.widened += 1
        outcome.record(
            error <= tolerance,
            lambda: _detail(
                case, f"closed form {closed!r} vs assembled {assembled!r} (rel {error:.3e})"
            ),
        )

    minors = leading_minors(cfg, lens, params)
    outcomes["positive_definite"].record(
        all(m > 0 for m in minors), lambda: _detail(case, f"leading minors {minors}")
    )

    mirrored = params.with_doa(-params.doa)
    lens_gap = _relative(crlb_lens(cfg, lens, params), crlb_lens(cfg, lens, mirrored))
    ula_gap = _relative(crlb_ula(cfg, params), crlb_ula(cfg, mirrored))
    outcomes["symmetry"].record(
        max(lens_gap, ula_gap) <= const.IDENTITY_RTOL,
        lambda: _detail(case, f"crlb(phi) vs crlb(-phi): lens {lens_gap:.3e}, ula {ula_gap:.3e}"),
    )

    phase_gap = scaled_mismatch(numeric, rephased_fisher(case, 1.0))
    outcomes["lens_phase_invariance"].record(
        phase_gap <= const.NUMERIC_RTOL,
        lambda: _detail(case, f"Fisher changes with lens phase by {phase_gap:.3e}"),
    )


def check_positivity(rng: np.random.Generator, draws: int, outcome: CheckOutcome) -> None:
    sizes = _odd_sizes()
    for _ in range(draws):
        cfg = ArrayConfig(int(rng.choice(sizes)), 0.5)
        sigma_c = _log_uniform(rng, *DRAW_LIMITS["sigma_c"])
        # p_lens only scales the margin; unit prefactor keeps the sweep cheap
        lens = LensConfig(sigma_c=sigma_c, p_lens=2 * math.pi * sigma_c**2)
        doa = float(rng.uniform(-math.pi / 2, math.pi / 2))
        try:
            margin = positivity_margin(cfg, lens, doa)
            ok = margin > 0
        except LensCrlbError as exc:
            margin, ok = math.nan, False
            logger.debug("positivity draw failed: %s", exc)
        outcome.record(
            ok,
            lambda: f"margin {margin!r} at N={cfg.n_elements}, sigma_c={sigma_c!r}, doa={doa!r}",
        )


CHECK_NAMES = (
    "fisher_vs_numeric",
    "determinant",
    "inverse_entry",
    "positive_definite",
    "symmetry",
    "lens_phase_invariance",
)


def run_check(
    seed: int = const.DEFAULT_CHECK_SEED,
    draws: int = const.DEFAULT_CHECK_DRAWS,
    positivity_draws: int = const.DEFAULT_POSITIVITY_DRAWS,
) -> CheckReport:
    rng = np.random.default_rng(seed)
    outcomes = {name: CheckOutcome(name) for name in CHECK_NAMES}
    for _ in range(draws):
        case = draw_case(rng)
        try:
            check_case(case, outcomes)
        except LensCrlbError as exc:
            outcomes["fisher_vs_numeric"].record(False, lambda: _detail(case, f"raised {exc!r}"))

    positivity = CheckOutcome("positivity")
    check_positivity(np.random.default_rng([seed, 1]), positivity_draws, positivity)

    report = CheckReport(seed=seed, draws=draws, outcomes=[*outcomes.values(), positivity])
    logger.info("check seed=%d draws=%d passed=%s", seed, draws, report.passed)
    return report


def format_check_report(report: CheckReport) -> str:
    lines = [f"Invariant check (seed={report.seed}, draws={report.draws})", "=" * 60]
    for outcome in report.outcomes:
        status = "PASS" if outcome.passed else "FAIL"
        line = f"  {status}  {outcome.name:<24} {outcome.cases - outcome.failures}/{outcome.cases}"
        if outcome.widened:
            line += f"  ({outcome.widened} ill-conditioned, tolerance widened)"
        if outcome.unverifiable:
            line += f"  ({outcome.unverifiable} unverifiable at double precision)"
        lines.append(line)
    failed = [outcome for outcome in report.outcomes if not outcome.passed]
    if failed:
        lines.append("")
        lines.append(f"First failure in {failed[0].name}:")
        lines.append(f"    {failed[0].first_failure}")
    lines.append("=" * 60)
    lines.append("all checks passed" if report.passed else f"{len(failed)} check(s) failed")
    return "\n".join(lines)


__all__ = [
    "CHECK_NAMES",
    "Case",
    "CheckOutcome",
    "CheckReport",
    "check_case",
    "check_positivity",
    "draw_case",
    "format_check_report",
    "identity_tolerance",
    "rephased_fisher",
    "run_check",
]
