"""Experiment configuration: JSON file <-> frozen dataclasses.

Angles are written in degrees in the file and converted to radians on use.
Every check runs while loading, so a config that loads is safe to execute.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from . import constants as const
from .array_model import ArrayConfig, LensConfig, SignalParams
from .errors import ConfigError, DomainError
from .simulate import SearchSettings


def _number(where: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite, got {value!r}")
    return float(value)


def _integer(where: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _section(data: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, Mapping):
        raise ConfigError(f"{key}: expected an object, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class PhiGrid:
    min_deg: float
    max_deg: float
    count: int

    def __post_init__(self) -> None:
        if not -90.0 < self.min_deg < self.max_deg < 90.0:
            raise ConfigError(
                "phi_grid must satisfy -90 < min < max < 90 degrees, "
                f"got [{self.min_deg}, {self.max_deg}]"
            )
        if self.count < 2:
            raise ConfigError(f"phi_grid.count must be >= 2, got {self.count}")

    def degrees(self) -> np.ndarray:
        return np.linspace(self.min_deg, self.max_deg, self.count)

    def radians(self) -> np.ndarray:
        return np.deg2rad(self.degrees())


@dataclass(frozen=True)
class SignalConfig:
    amplitude: float = const.DEFAULT_AMPLITUDE
    phase_deg: float = const.DEFAULT_PHASE_DEG
    noise_variance: float = const.DEFAULT_NOISE_VARIANCE
    lens_phase: float = const.DEFAULT_LENS_PHASE

    def __post_init__(self) -> None:
        if self.amplitude <= 0:
            raise ConfigError(f"signal.amplitude must be positive, got {self.amplitude}")
        if self.noise_variance <= 0:
            raise ConfigError(f"signal.noise_variance must be positive, got {self.noise_variance}")

    def params(self, doa: float, noise_variance: Optional[float] = None) -> SignalParams:
        return SignalParams(
            amplitude=self.amplitude,
            phase=math.radians(self.phase_deg),
            doa=doa,
            noise_variance=self.noise_variance if noise_variance is None else noise_variance,
            lens_phase=self.lens_phase,
        )


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = const.DEFAULT_MC_TRIALS
    master_seed: int = const.DEFAULT_MASTER_SEED
    snr_list_db: Tuple[float, ...] = const.DEFAULT_SNR_LIST_DB
    doa_deg: float = const.DEFAULT_MC_DOA_DEG

    def __post_init__(self) -> None:
        if self.trials < const.MIN_TRIALS:
            raise ConfigError(f"mc.trials must be >= {const.MIN_TRIALS}, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"mc.master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if not self.snr_list_db:
            raise ConfigError("mc.snr_list_db must not be empty")
        if not -90.0 < self.doa_deg < 90.0:
            raise ConfigError(f"mc.doa_deg must lie in (-90, 90), got {self.doa_deg}")


@dataclass(frozen=True)
class CheckConfig:
    seed: int = const.DEFAULT_CHECK_SEED
    draws: int = const.DEFAULT_CHECK_DRAWS
    positivity_draws: int = const.DEFAULT_POSITIVITY_DRAWS

    def __post_init__(self) -> None:
        if self.draws < 1 or self.positivity_draws < 1:
            raise ConfigError("check.draws and check.positivity_draws must be >= 1")
        if self.seed < 0:
            raise ConfigError(f"check.seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = const.DEFAULT_OUTPUT_DIRECTORY
    format: str = const.DEFAULT_OUTPUT_FORMAT

    def __post_init__(self) -> None:
        if self.format not in const.OUTPUT_FORMATS:
            raise ConfigError(
                f"output.format must be one of {const.OUTPUT_FORMATS}, got {self.format!r}"
            )

    @property
    def path(self) -> Path:
        return Path(self.directory)


@dataclass(frozen=True)
class ExperimentConfig:
    array: ArrayConfig
    sigma_c_list: Tuple[float, ...]
    phi_grid: PhiGrid
    signal: SignalConfig = field(default_factory=SignalConfig)
    phi_support_deg: Tuple[float, float] = const.DEFAULT_PHI_SUPPORT_DEG
    mc: Optional[MonteCarloConfig] = None
    search: SearchSettings = field(default_factory=SearchSettings)
    check: CheckConfig = field(default_factory=CheckConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self) -> None:
        if not self.sigma_c_list:
            raise ConfigError("sigma_c_list must not be empty")
        for sigma_c in self.sigma_c_list:
            if not sigma_c > 0:
                raise ConfigError(f"sigma_c_list entries must be positive, got {sigma_c}")
        low, high = self.phi_support_deg
        if not -90.0 < low < high < 90.0:
            raise ConfigError(
                f"lens.phi_support_deg must satisfy -90 < low < high < 90, got [{low}, {high}]"
            )

    @property
    def phi_support(self) -> Tuple[float, float]:
        low, high = self.phi_support_deg
        return math.radians(low), math.radians(high)

    def lens(self, sigma_c: float) -> LensConfig:
        return LensConfig.normalized(self.array, sigma_c, self.phi_support)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("configuration root must be an object")
        try:
            return cls._parse(data)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def _parse(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        array = _section(data, "array")
        if "n_elements" not in array:
            raise ConfigError("array.n_elements is required")
        array_cfg = ArrayConfig(
            n_elements=_integer("array.n_elements", array["n_elements"]),
            spacing_wavelengths=_number(
                "array.spacing_wavelengths",
                array.get("spacing_wavelengths", const.DEFAULT_SPACING_WAVELENGTHS),
            ),
        )

        sigmas = data.get("sigma_c_list")
        if not isinstance(sigmas, list):
            raise ConfigError("sigma_c_list must be a list of numbers")
        sigma_c_list = tuple(_number(f"sigma_c_list[{i}]", s) for i, s in enumerate(sigmas))

        grid = _section(data, "phi_grid")
        min_deg, max_deg, count = const.DEFAULT_PHI_GRID_DEG
        phi_grid = PhiGrid(
            min_deg=_number("phi_grid.min", grid.get("min", min_deg)),
            max_deg=_number("phi_grid.max", grid.get("max", max_deg)),
            count=_integer("phi_grid.count", grid.get("count", count)),
        )

        signal = _section(data, "signal")
        signal_cfg = SignalConfig(
            amplitude=_number("signal.amplitude", signal.get("amplitude", const.DEFAULT_AMPLITUDE)),
            phase_deg=_number("signal.phase_deg", signal.get("phase_deg", const.DEFAULT_PHASE_DEG)),
            noise_variance=_number(
                "signal.noise_variance",
                signal.get("noise_variance", const.DEFAULT_NOISE_VARIANCE),
            ),
            lens_phase=_number(
                "signal.lens_phase", signal.get("lens_phase", const.DEFAULT_LENS_PHASE)
            ),
        )

        lens = _section(data, "lens")
        support = lens.get("phi_support_deg", list(const.DEFAULT_PHI_SUPPORT_DEG))
        if not isinstance(support, list) or len(support) != 2:
            raise ConfigError("lens.phi_support_deg must be a [low, high] pair")
        phi_support_deg = (
            _number("lens.phi_support_deg[0]", support[0]),
            _number("lens.phi_support_deg[1]", support[1]),
        )

        mc_cfg = None
        if data.get("mc") is not None:
            mc = _section(data, "mc")
            snrs = mc.get("snr_list_db", list(const.DEFAULT_SNR_LIST_DB))
            if not isinstance(snrs, list):
                raise ConfigError("mc.snr_list_db must be a list of numbers")
            mc_cfg = MonteCarloConfig(
                trials=_integer("mc.trials", mc.get("trials", const.DEFAULT_MC_TRIALS)),
                master_seed=_integer(
                    "mc.master_seed", mc.get("master_seed", const.DEFAULT_MASTER_SEED)
                ),
                snr_list_db=tuple(_number(f"mc.snr_list_db[{i}]", s) for i, s in enumerate(snrs)),
                doa_deg=_number("mc.doa_deg", mc.get("doa_deg", const.DEFAULT_MC_DOA_DEG)),
            )

        search = _section(data, "search")
        search_cfg = SearchSettings(
            grid_points=_integer(
                "search.grid_points", search.get("grid_points", const.DEFAULT_GRID_POINTS)
            ),
            refine_iters=_integer(
                "search.refine_iters", search.get("refine_iters", const.DEFAULT_REFINE_ITERS)
            ),
        )

        check = _section(data, "check")
        check_cfg = CheckConfig(
            seed=_integer("check.seed", check.get("seed", const.DEFAULT_CHECK_SEED)),
            draws=_integer("check.draws", check.get("draws", const.DEFAULT_CHECK_DRAWS)),
            positivity_draws=_integer(
                "check.positivity_draws",
                check.get("positivity_draws", const.DEFAULT_POSITIVITY_DRAWS),
            ),
        )

        output = _section(data, "output")
        output_cfg = OutputConfig(
            directory=str(output.get("directory", const.DEFAULT_OUTPUT_DIRECTORY)),
            format=str(output.get("format", const.DEFAULT_OUTPUT_FORMAT)),
        )

        return cls(
            array=array_cfg,
            sigma_c_list=sigma_c_list,
            phi_grid=phi_grid,
            signal=signal_cfg,
            phi_support_deg=phi_support_deg,
            mc=mc_cfg,
            search=search_cfg,
            check=check_cfg,
            output=output_cfg,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "array": {
                "n_elements": self.array.n_elements,
                "spacing_wavelengths": self.array.spacing_wavelengths,
            },
            "sigma_c_list": list(self.sigma_c_list),
            "phi_grid": {
                "min": self.phi_grid.min_deg,
                "max": self.phi_grid.max_deg,
                "count": self.phi_grid.count,
            },
            "lens": {"phi_support_deg": list(self.phi_support_deg)},
            "signal": {
                "amplitude": self.signal.amplitude,
                "phase_deg": self.signal.phase_deg,
                "noise_variance": self.signal.noise_variance,
                "lens_phase": self.signal.lens_phase,
            },
            "search": {
                "grid_points": self.search.grid_points,
                "refine_iters": self.search.refine_iters,
            },
            "check": {
                "seed": self.check.seed,
                "draws": self.check.draws,
                "positivity_draws": self.check.positivity_draws,
            },
            "output": {"directory": self.output.directory, "format": self.output.format},
        }
        if self.mc is not None:
            data["mc"] = {
                "trials": self.mc.trials,
                "master_seed": self.mc.master_seed,
                "snr_list_db": list(self.mc.snr_list_db),
                "doa_deg": self.mc.doa_deg,
            }
        return data


def default_config() -> ExperimentConfig:
    """Default study: N = 17, four curvatures, phi in [-60, 60] degrees."""
    min_deg, max_deg, count = const.DEFAULT_PHI_GRID_DEG
    return ExperimentConfig(
        array=ArrayConfig(const.DEFAULT_N_ELEMENTS, const.DEFAULT_SPACING_WAVELENGTHS),
        sigma_c_list=const.DEFAULT_SIGMA_C_LIST,
        phi_grid=PhiGrid(min_deg, max_deg, count),
        mc=MonteCarloConfig(),
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON experiment file. Missing files raise ``OSError``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data)


def dump_config(config: ExperimentConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


__all__ = [
    "CheckConfig",
    "ExperimentConfig",
    "MonteCarloConfig",
    "OutputConfig",
    "PhiGrid",
    "SignalConfig",
    "default_config",
    "dump_config",
    "load_config",
]
