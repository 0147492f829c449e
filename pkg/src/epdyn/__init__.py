"""Pseudo-completeness relations and closed-form dynamics at
exceptional points of non-Hermitian Hamiltonians."""

__version__ = "0.1.0"

from . import adiabatic, diagnostics, jordan, linalg, models, pcr, propagator
from .exceptions import EpdynError

__all__ = [
    "__version__",
    "EpdynError",
    "adiabatic",
    "diagnostics",
    "jordan",
    "linalg",
    "models",
    "pcr",
    "propagator",
]
