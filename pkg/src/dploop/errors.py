"""Exception types shared across the package."""


class DPLoopError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(DPLoopError, ValueError):
    """Physical parameters outside the admissible ranges."""


class InvalidRegime(ParameterError):
    """Sign/wavenumber combination the solution family does not cover.

    Loop diagonals (sign -1) require kappa*k > 2; smooth diagonals
    (sign +1) require 0 < kappa*k < 1.  In between the amplitude
    coefficient is zero or imaginary.
    """


class VelocityPole(ParameterError):
    """kappa*k = 1 puts the mode velocity on its pole."""


class ImaginaryCoefficient(ParameterError):
    """Amplitude coefficient radicand is non-positive (1 <= kappa*k <= 2)."""


class DegenerateModes(ParameterError):
    """Two modes with identical (k, y0); the two-mode solution collapses."""


class DegenerateDelta(ParameterError):
    """kappa^2 (k1^2 + k1 k2 + k2^2) = 3 zeroes the interaction denominators."""


class PhaseMismatch(DPLoopError, ValueError):
    """Algebra on ExpPoly values built over different phase sets."""


class MapSingularity(DPLoopError, ArithmeticError):
    """Coordinate map log argument non-positive at a requested point."""


class SingularIntegrand(DPLoopError, ArithmeticError):
    """A zero of q detected inside a hodograph integration range."""


class TroughCountMismatch(DPLoopError, RuntimeError):
    """A frame does not show the expected trough/crest census."""


class FeatureMatchFailure(DPLoopError, RuntimeError):
    """Wave features cannot be paired across two frames."""


class ParseError(DPLoopError, ValueError):
    """Malformed scenario configuration text."""


class ValidationError(DPLoopError, ValueError):
    """Scenario configuration with inadmissible physics parameters."""
