"""Tests for SVG rendering of a bound sweep."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from lens_crlb.config import default_config
from lens_crlb.errors import DomainError
from lens_crlb.experiments import SweepResult, compute_sweep
from lens_crlb.plot import build_figure, emit_plot


@pytest.fixture(scope="module")
def sweep() -> SweepResult:
    return compute_sweep(default_config(), workers=1)


def test_figure_has_one_line_per_sigma_plus_ula(sweep: SweepResult) -> None:
    ax = build_figure(sweep).axes[0]
    lines = ax.get_lines()
    assert len(lines) == 5
    assert ax.get_yscale() == "log"
    labels = [text.get_text() for text in ax.get_legend().get_texts()]
    assert len(labels) == 5
    assert labels[-1] == "ULA (no lens)"


def test_ula_line_is_symmetric_with_minimum_at_broadside(sweep: SweepResult) -> None:
    ula = build_figure(sweep).axes[0].get_lines()[-1]
    x, y = np.asarray(ula.get_xdata()), np.asarray(ula.get_ydata())
    np.testing.assert_allclose(y, y[::-1], rtol=1e-12)
    assert x[int(np.argmin(y))] == 0.0


def test_emit_plot_writes_stable_svg(sweep: SweepResult, tmp_path: Path) -> None:
    first = emit_plot(sweep, tmp_path / "a" / "sweep.svg")
    second = emit_plot(sweep, tmp_path / "b" / "sweep.svg")
    text = first.read_text(encoding="utf-8")
    assert "<svg" in text
    assert first.read_bytes() == second.read_bytes()


def test_empty_sweep_is_rejected(tmp_path: Path) -> None:
    with pytest.raises(DomainError):
        emit_plot(SweepResult([]), tmp_path / "empty.svg")
