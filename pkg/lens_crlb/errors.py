"""Exception types raised by the lens CRLB toolkit."""

from __future__ import annotations

from typing import Optional


class LensCrlbError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LensCrlbError, ValueError):
    """A numeric input lies outside the model's domain."""


class ConfigError(LensCrlbError):
    """An experiment configuration failed validation."""


class InvariantViolation(LensCrlbError):
    """A numerical invariant that must always hold was found broken."""


class UnidentifiableGainError(LensCrlbError):
    """The complex gain cannot be estimated from the snapshot."""


class MonteCarloTrialError(LensCrlbError):
    """A single Monte Carlo trial failed; ``seed`` reproduces it."""

    def __init__(self, message: str, seed: Optional[int] = None) -> None:
        super().__init__(message)
        self.seed = seed


__all__ = [
    "ConfigError",
    "DomainError",
    "InvariantViolation",
    "LensCrlbError",
    "MonteCarloTrialError",
    "UnidentifiableGainError",
]
