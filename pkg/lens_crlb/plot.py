"""SVG rendering of a bound sweep: one lens curve per sigma_c plus the ULA reference."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Union

import matplotlib
from matplotlib.figure import Figure

from .errors import DomainError
from .experiments import SweepResult

logger = logging.getLogger(__name__)

# fixed salt and no timestamp so the same sweep always renders the same bytes
SVG_RC = {"svg.hashsalt": "lens-crlb", "svg.fonttype": "path"}


def build_figure(sweep: SweepResult) -> Figure:
    if not sweep.rows:
        raise DomainError("cannot plot an empty sweep")

    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    for sigma_c in sweep.sigma_c_values:
        ax.plot(
            sweep.column("phi_deg", sigma_c),
            sweep.column("crlb_lens", sigma_c),
            linewidth=1.2,
            label=f"lens, $\\sigma_c$ = {sigma_c:.4g}",
        )

    reference = sweep.sigma_c_values[0]
    ax.plot(
        sweep.column("phi_deg", reference),
        sweep.column("crlb_ula", reference),
        color="black",
        linestyle="--",
        linewidth=1.4,
        label="ULA (no lens)",
    )
    ax.set_yscale("log")
    ax.set_xlabel("DoA $\\phi$ (degrees)")
    ax.set_ylabel("CRLB (rad$^2$)")
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend(loc="upper center", fontsize="small")
    fig.tight_layout()
    return fig


def emit_plot(sweep: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    fig = build_figure(sweep)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("wrote %s", path)
    return path


__all__ = ["build_figure", "emit_plot"]
