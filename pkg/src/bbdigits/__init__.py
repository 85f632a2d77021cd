"""Integer and dyadic-digit decomposition of the random energy of a thermal radiation mode."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    CODATA,
    DigitVector,
    DomainError,
    ModeParams,
    PhysicalConstants,
    SpectralPoint,
)
from .samplers import DEFAULT_SEED, EnergySample, RngStream  # noqa: E402
from .stats import TestReport  # noqa: E402

__all__ = [
    "__version__",
    "CODATA",
    "DEFAULT_SEED",
    "DigitVector",
    "DomainError",
    "EnergySample",
    "ModeParams",
    "PhysicalConstants",
    "RngStream",
    "SpectralPoint",
    "TestReport",
]
