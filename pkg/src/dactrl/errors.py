"""Exception types shared across the package."""


class DactrlError(Exception):
    """Base class for all package errors."""


class ConfigError(DactrlError):
    """Invalid scenario configuration (bad family, non-Hurwitz filter, ...)."""


class InvalidPlanError(ConfigError):
    """Desired error trajectory plan is unusable (e.g. settling time <= 0)."""


class InvalidFilterError(ConfigError):
    """Filter polynomial is not Hurwitz where a stable filter is required."""


class ShapeError(DactrlError, ValueError):
    """Vector dimensions do not match."""


class FitError(DactrlError):
    """Least-squares weight fit failed (singular/ill-conditioned system)."""


class GainSignError(DactrlError):
    """Plant input gain lost its required sign during evaluation."""


class NumericBlowupError(DactrlError):
    """State left the sane range during integration.

    Carries the step index and, when raised from a closed-loop run, the
    partial trace accumulated up to the failure.
    """

    def __init__(self, message, step=None, partial_trace=None):
        super().__init__(message)
        self.step = step
        self.partial_trace = partial_trace


class TraceFormatError(DactrlError):
    """A trace is missing columns required by an analysis routine."""


class DomainError(DactrlError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class LemmaHypothesisError(DactrlError):
    """Sequence data violates a lemma hypothesis (input problem, not a lemma failure)."""
