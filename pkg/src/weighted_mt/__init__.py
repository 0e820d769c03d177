"""Numerics for weighted Moser-Trudinger inequalities on the upper half-plane."""

__version__ = "0.1.0"

from .constants import ConstantsBundle, WeightParams, angular_mass, build_constants  # noqa: E402
from .errors import DomainError, ExponentOverflowError, NumericError  # noqa: E402
from .profiles import HalfLineProfile, RadialProfile  # noqa: E402

__all__ = [
    "__version__",
    "WeightParams",
    "ConstantsBundle",
    "angular_mass",
    "build_constants",
    "RadialProfile",
    "HalfLineProfile",
    "DomainError",
    "NumericError",
    "ExponentOverflowError",
]
