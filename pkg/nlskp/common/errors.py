"""Exceptions raised by nlskp."""
from typing import Optional


class ConfigError(ValueError):
    """Invalid configuration value or config file."""


class ZeroMeanViolation(ValueError):
    """A field that must have zero x-mean per transverse line does not."""


class DomainError(ValueError):
    """A nonlinearity remainder was evaluated outside 1 + r >= 0."""


class SimulationError(RuntimeError):
    """Base class for breakdowns detected while evolving a state.

    Args:
        message: Human-readable description.
        t: Scaled time at which the breakdown was detected, if known.
    """

    def __init__(self, message: str, t: Optional[float] = None) -> None:
        if t is not None:
            message = f"{message} (t={t:.6g})"
        super().__init__(message)
        self.t = t


class VortexDetected(SimulationError):
    """min |psi| fell to or below the vortex floor."""


class UnwrapAmbiguity(SimulationError):
    """Phase unwrapping is not resolved by the grid."""


class AmplitudeBound(SimulationError):
    """The amplitude left the region where the polar ansatz is valid."""


class NonFinite(SimulationError):
    """A state contains NaN or Inf samples."""
