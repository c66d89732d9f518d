"""Tests for the Fisher matrix, its closed forms and the DoA bounds."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Any

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lens_crlb.array_model import ArrayConfig, LensConfig, SignalParams
from lens_crlb.check import identity_tolerance, scaled_mismatch
from lens_crlb.errors import DomainError, InvariantViolation
from lens_crlb.fisher import (
    FisherMatrix,
    crlb_lens,
    crlb_lens_large_sigma,
    crlb_ula,
    d_moments,
    det3,
    fisher_determinant_closed,
    fisher_matrix,
    fisher_numeric,
    inv3,
    leading_minors,
    positivity_margin,
)


@st.composite
def cases(draw: Any) -> tuple:
    cfg = ArrayConfig(
        draw(st.sampled_from(list(range(3, 42, 2)))),
        draw(st.floats(0.05, 0.5)),
    )
    sigma_c = math.exp(draw(st.floats(math.log(0.2), math.log(200.0))))
    lens = LensConfig.normalized(cfg, sigma_c)
    amplitude = draw(st.floats(0.5, 2.0))
    snr_db = draw(st.floats(-10.0, 30.0))
    params = SignalParams(
        amplitude=amplitude,
        phase=draw(st.floats(-math.pi, math.pi)),
        doa=math.radians(draw(st.floats(-75.0, 75.0))),
        noise_variance=amplitude**2 / 10 ** (snr_db / 10),
        lens_phase=draw(st.floats(-math.pi, math.pi)),
    )
    return cfg, lens, params


def _identity_tolerance(fisher: FisherMatrix) -> float:
    tolerance = identity_tolerance(fisher)
    # too ill-conditioned to verify in double precision
    assume(tolerance is not None)
    return tolerance


def _params(doa: float = 0.0, amplitude: float = 1.0, noise_variance: float = 1.0) -> SignalParams:
    return SignalParams(amplitude=amplitude, phase=0.2, doa=doa, noise_variance=noise_variance)


def test_d_moments_scalar_oracle() -> None:
    moments = d_moments(ArrayConfig(3, 0.5), LensConfig(sigma_c=1.0, p_lens=1.0), 0.0)
    assert moments.d0 == pytest.approx((1 + 2 * math.exp(-2)) / (2 * math.pi))
    assert moments.d1 == 0.0
    assert moments.d2 == pytest.approx(2 * math.exp(-2) / (2 * math.pi))


@pytest.mark.parametrize("n_elements", [3, 9, 17, 41])
@pytest.mark.parametrize("sigma_c", [0.3, 1 / 1.96, 2.0, 150.0])
def test_d1_is_exactly_zero_at_broadside(n_elements: int, sigma_c: float) -> None:
    cfg = ArrayConfig(n_elements, 0.5)
    moments = d_moments(cfg, LensConfig.normalized(cfg, sigma_c), 0.0)
    assert moments.d1 == 0.0
    assert moments.margin == pytest.approx(moments.d0 * moments.d2, rel=1e-12)


def test_d_moments_wide_lens_approach_flat_array() -> None:
    cfg = ArrayConfig(17, 0.5)
    moments = d_moments(cfg, LensConfig.normalized(cfg, 100.0), 0.0)
    assert moments.d0 == pytest.approx(17, rel=0.02)
    assert moments.d2 == pytest.approx(17 * (17**2 - 1) / 12, rel=0.02)


@pytest.mark.parametrize("sigma_c", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("doa", [-1.2, -0.3, 0.0, 0.45, 1.5])
def test_positivity_margin_three_element_closed_form(sigma_c: float, doa: float) -> None:
    cfg = ArrayConfig(3, 0.5)
    lens = LensConfig(sigma_c=sigma_c, p_lens=2 * math.pi * sigma_c**2)
    mean = cfg.mean_offset(doa)
    a = {k: math.exp(-2 * (k + mean) ** 2 / sigma_c**2) for k in (-1, 0, 1)}
    expected = 4 * a[-1] * a[1] + a[-1] * a[0] + a[0] * a[1]
    assert positivity_margin(cfg, lens, doa) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    n_elements=st.sampled_from(list(range(3, 42, 2))),
    log_sigma=st.floats(math.log(0.2), math.log(200.0)),
    doa=st.floats(-1.5707, 1.5707),
)
def test_positivity_margin_is_positive(n_elements: int, log_sigma: float, doa: float) -> None:
    sigma_c = math.exp(log_sigma)
    lens = LensConfig(sigma_c=sigma_c, p_lens=2 * math.pi * sigma_c**2)
    assert positivity_margin(ArrayConfig(n_elements, 0.5), lens, doa) > 0


def test_zero_margin_is_an_invariant_violation() -> None:
    cfg = ArrayConfig(3, 0.5)
    # underflow every element except one
    lens = LensConfig(sigma_c=0.01, p_lens=1.0)
    with pytest.raises(InvariantViolation):
        positivity_margin(cfg, lens, 0.0)


def test_fisher_matrix_structure() -> None:
    cfg = ArrayConfig(17, 0.5)
    lens = LensConfig.normalized(cfg, 2.0)
    fisher = fisher_matrix(cfg, lens, _params(doa=0.3))
    assert fisher["p", "b"] == 0.0
    assert fisher["b", "p"] == 0.0
    assert fisher.is_symmetric()
    assert fisher.is_positive_definite()
    assert not fisher.entries.flags.writeable


def test_fisher_matrix_wide_lens_power_entry() -> None:
    cfg = ArrayConfig(3, 0.5)
    fisher = fisher_matrix(cfg, LensConfig.normalized(cfg, 1e4), _params())
    assert fisher["p", "p"] == pytest.approx(6.0, rel=1e-3)


def test_phase_doa_entry_vanishes_at_broadside() -> None:
    cfg = ArrayConfig(9, 0.5)
    lens = LensConfig.normalized(cfg, 2.0)
    assert fisher_matrix(cfg, lens, _params())["b", "phi"] == pytest.approx(0.0, abs=1e-12)
    assert abs(fisher_numeric(cfg, lens, _params())["b", "phi"]) < 1e-6


def test_fisher_entries_scale_with_amplitude() -> None:
    cfg = ArrayConfig(11, 0.4)
    lens = LensConfig.normalized(cfg, 3.0)
    one = fisher_numeric(cfg, lens, _params(doa=0.2, amplitude=1.0))
    two = fisher_numeric(cfg, lens, _params(doa=0.2, amplitude=2.0))
    assert two["p", "p"] == pytest.approx(one["p", "p"], rel=1e-6)
    assert two["b", "b"] == pytest.approx(4 * one["b", "b"], rel=1e-6)
    assert two["phi", "phi"] == pytest.approx(4 * one["phi", "phi"], rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(case=cases())
def test_fisher_matrix_matches_finite_differences(case: tuple) -> None:
    cfg, lens, params = case
    analytic = fisher_matrix(cfg, lens, params)
    numeric = fisher_numeric(cfg, lens, params)
    scale = np.sqrt(np.outer(np.diag(analytic.entries), np.diag(analytic.entries)))
    assert np.all(np.abs(analytic.entries - numeric.entries) <= 1e-6 * scale)


@settings(max_examples=100, deadline=None)
@given(case=cases())
def test_closed_form_determinant_matches_cofactor_expansion(case: tuple) -> None:
    cfg, lens, params = case
    fisher = fisher_matrix(cfg, lens, params)
    closed = fisher_determinant_closed(cfg, lens, params)
    assert closed > 0
    assert closed == pytest.approx(fisher.determinant(), rel=_identity_tolerance(fisher))


@settings(max_examples=100, deadline=None)
@given(case=cases())
def test_crlb_lens_is_inverse_entry(case: tuple) -> None:
    cfg, lens, params = case
    fisher = fisher_matrix(cfg, lens, params)
    bound = crlb_lens(cfg, lens, params)
    assert bound == pytest.approx(fisher.inverse()[2, 2], rel=_identity_tolerance(fisher))


@settings(max_examples=100, deadline=None)
@given(case=cases())
def test_leading_minors_are_positive(case: tuple) -> None:
    minors = leading_minors(*case)
    assert all(minor > 0 for minor in minors)


@settings(max_examples=50, deadline=None)
@given(case=cases())
def test_bounds_are_even_in_doa(case: tuple) -> None:
    cfg, lens, params = case
    mirrored = params.with_doa(-params.doa)
    assert crlb_lens(cfg, lens, mirrored) == pytest.approx(crlb_lens(cfg, lens, params), rel=1e-9)
    assert crlb_ula(cfg, mirrored) == pytest.approx(crlb_ula(cfg, params), rel=1e-12)


def test_bounds_ignore_lens_phase() -> None:
    cfg = ArrayConfig(17, 0.5)
    lens = LensConfig.normalized(cfg, 2.0)
    base = _params(doa=0.4)
    shifted = replace(base, lens_phase=1.3)
    gap = scaled_mismatch(fisher_numeric(cfg, lens, base), fisher_numeric(cfg, lens, shifted))
    assert gap < 1e-6
    assert crlb_lens(cfg, lens, shifted) == crlb_lens(cfg, lens, base)


def test_bounds_scale_as_inverse_amplitude_squared() -> None:
    cfg = ArrayConfig(17, 0.05)
    lens = LensConfig.normalized(cfg, 2.0)
    for doa in (0.0, 0.3, -0.9):
        base = _params(doa=doa)
        louder = _params(doa=doa, amplitude=3.0)
        assert crlb_lens(cfg, lens, louder) == pytest.approx(crlb_lens(cfg, lens, base) / 9, rel=1e-12)
        assert crlb_ula(cfg, louder) == pytest.approx(crlb_ula(cfg, base) / 9, rel=1e-12)


def test_determinant_scaling() -> None:
    cfg = ArrayConfig(9, 0.5)
    lens = LensConfig.normalized(cfg, 2.0)
    base = fisher_determinant_closed(cfg, lens, _params(doa=0.2))
    louder = fisher_determinant_closed(cfg, lens, _params(doa=0.2, amplitude=2.0))
    noisier = fisher_determinant_closed(cfg, lens, _params(doa=0.2, noise_variance=2.0))
    assert louder == pytest.approx(16 * base, rel=1e-12)
    assert noisier == pytest.approx(base / 8, rel=1e-12)


def test_crlb_ula_values() -> None:
    kd_one = 1 / (2 * math.pi)
    assert crlb_ula(ArrayConfig(3, kd_one), _params()) == pytest.approx(0.25)
    assert crlb_ula(ArrayConfig(5, kd_one), _params()) == pytest.approx(0.05)


def test_crlb_ula_matches_numeric_fisher_without_lens() -> None:
    cfg = ArrayConfig(5, 1 / (2 * math.pi))
    params = _params(doa=0.0)
    # the b/phi block of an identity-amplitude array
    n = cfg.indices
    fisher = np.array(
        [
            [2 * cfg.n_elements, 0.0, 0.0],
            [0.0, 2 * cfg.n_elements, 2 * float(np.sum(n))],
            [0.0, 2 * float(np.sum(n)), 2 * float(np.sum(n**2))],
        ]
    )
    assert crlb_ula(cfg, params) == pytest.approx(inv3(fisher)[2, 2], rel=1e-12)


def test_crlb_ula_grows_towards_endfire() -> None:
    cfg = ArrayConfig(9, 0.5)
    values = [crlb_ula(cfg, _params(doa=doa)) for doa in np.linspace(0.0, 1.55, 40)]
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(DomainError):
        crlb_ula(cfg, _params(doa=math.pi / 2))


def test_wide_lens_collapses_to_ula_bound() -> None:
    cfg = ArrayConfig(17, 0.5)
    params = _params()
    lens = LensConfig.normalized(cfg, 1e4)
    assert crlb_lens(cfg, lens, params) == pytest.approx(crlb_lens_large_sigma(cfg, params), rel=1e-4)
    assert crlb_lens_large_sigma(cfg, params) == crlb_ula(cfg, params)


def test_moderate_lens_departs_from_ula_bound() -> None:
    cfg = ArrayConfig(17, 0.05)
    lens = LensConfig.normalized(cfg, 10.0)
    ratios = [
        crlb_lens(cfg, lens, _params(doa=math.radians(deg))) / crlb_ula(cfg, _params(doa=math.radians(deg)))
        for deg in np.linspace(-60, 60, 121)
    ]
    assert max(abs(r - 1) for r in ratios) > 0.1


def test_fisher_matrix_rejects_bad_shape() -> None:
    with pytest.raises(DomainError):
        FisherMatrix(np.eye(2))


def test_det3_and_inv3_agree_with_numpy() -> None:
    m = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
    assert det3(m) == pytest.approx(np.linalg.det(m), rel=1e-12)
    np.testing.assert_allclose(inv3(m), np.linalg.inv(m), rtol=1e-12)
    with pytest.raises(InvariantViolation):
        inv3(np.zeros((3, 3)))
