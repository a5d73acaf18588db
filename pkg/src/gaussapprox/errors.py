"""Exception types shared across the package."""


class GaussApproxError(ValueError):
    """Base class for numerical-contract violations raised by this package."""


class NotPositiveDefinite(GaussApproxError):
    """A matrix required to be positive definite fails the spectral tolerance."""


class HypothesisViolation(GaussApproxError):
    """A (Hurst index, Hermite rank) pair falls outside the admissible range."""
