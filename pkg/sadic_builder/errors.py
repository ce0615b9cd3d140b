from typing import Optional


class SadicError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(SadicError):
    """Matrix shapes do not conform."""


class SingularMatrixError(SadicError):
    """Matrix has no inverse over the rationals."""


class DiagramError(SadicError):
    """Invalid Bratteli diagram data or level/cut index."""


class MorphismError(SadicError):
    """Invalid morphism, alphabet mismatch or unmet ordering precondition."""


class LanguageError(SadicError):
    """Word generation, factor enumeration or bound evaluation failed."""


class TargetError(SadicError):
    """Complexity target could not be parsed or evaluated."""


class ConfigError(SadicError):
    """Configuration value out of range."""


class ConstructionError(SadicError):
    """A pipeline stopped at a named condition on a given level."""

    def __init__(self, message: str, level: Optional[int] = None, condition: Optional[str] = None):
        super().__init__(message)
        self.level = level
        self.condition = condition


class ThresholdError(ConstructionError):
    """No threshold t satisfies m^3 t / p_t < 1/i within the scan limit."""

    def __init__(self, level: int, m: int, scan_limit: int):
        super().__init__(
            f"threshold m^3*t/p_t < 1/{level} (m={m}) not reached within scan_limit={scan_limit}",
            level=level,
            condition="threshold",
        )
        self.m = m
        self.scan_limit = scan_limit


class SerializationError(SadicError):
    """Malformed JSON document for one of the package's types."""
