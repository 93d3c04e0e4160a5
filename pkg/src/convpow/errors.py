"""Exception types shared across the package."""


class PrecisionExhausted(ArithmeticError):
    """Raised when round-off clamping in a transform-based convolution removes
    more mass than the tolerance allows.  Shrink the power or the support."""


class DiagnosticRefused(ValueError):
    """Raised when a diagnostic cannot be evaluated meaningfully on its input,
    e.g. the transform modulus is pinned at 1 on the whole grid."""


class HypothesisFailure(ValueError):
    """Raised when a fitted quantity contradicts the hypothesis it certifies,
    e.g. a non-positive decay rate or majorant coefficient."""
