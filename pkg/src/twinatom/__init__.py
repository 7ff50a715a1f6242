"""Simulation of a double Stern-Gerlach twin-atom interferometer."""

__version__ = "0.1.0"

from .errors import DegenerateStateError, FitFailureError, InvalidArgumentError
from .interferometer import (
    PhaseSettings,
    ScanResult,
    analytic_signal,
    coincidence,
    evolve,
    fit_lambda,
    scan,
    signal,
    signal_many,
)
from .robustness import NoiseSpec, ensemble_scan, separation_report
from .twinstate import linear_entropy, purity, rho0, singlet

__all__ = [
    "DegenerateStateError",
    "FitFailureError",
    "InvalidArgumentError",
    "NoiseSpec",
    "PhaseSettings",
    "ScanResult",
    "analytic_signal",
    "coincidence",
    "ensemble_scan",
    "evolve",
    "fit_lambda",
    "linear_entropy",
    "purity",
    "rho0",
    "scan",
    "separation_report",
    "signal",
    "signal_many",
    "singlet",
]
