"""Cox-process vehicular networks on random street systems.

Street geometries (OG, PLP, PSP, PLM), Palm-conditioned typical-vehicle
scenarios, Monte Carlo estimators, quadrature evaluation of the SIR and
nearest-neighbour expressions, and model-equivalence checks.
"""

from .errors import (
    ConfigError,
    DegenerateInputError,
    IntegrationError,
    ParameterError,
    UnsupportedOrderError,
)
from .laws import DeterministicLaw, HalfLengthLaw, RayleighLaw, TabulatedLaw, law_from_spec
from .curves import SirCurve

__all__ = [
    "ConfigError",
    "DegenerateInputError",
    "IntegrationError",
    "ParameterError",
    "UnsupportedOrderError",
    "DeterministicLaw",
    "HalfLengthLaw",
    "RayleighLaw",
    "TabulatedLaw",
    "law_from_spec",
    "SirCurve",
]

__version__ = "0.1.0"
