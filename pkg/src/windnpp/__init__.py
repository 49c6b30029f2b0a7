"""Wind farms beside nuclear plants: voltage quality, emergency-power reliability,
geographic smoothing, capacity credit and levelized cost of energy."""

from .errors import (
    ConfigError,
    EmptyWindowError,
    GeneratorError,
    InvalidInputError,
    MultipleRecurrentClassError,
    ParseError,
    SingularCurveError,
    StiffnessError,
    UndefinedLCOEError,
    ValidityDomainError,
    WindNppError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EmptyWindowError",
    "GeneratorError",
    "InvalidInputError",
    "MultipleRecurrentClassError",
    "ParseError",
    "SingularCurveError",
    "StiffnessError",
    "UndefinedLCOEError",
    "ValidityDomainError",
    "WindNppError",
]
