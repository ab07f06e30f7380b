"""Exception types shared across the package."""


class UnsupportedDerivativeError(ValueError):
    """Raised when a derivative is requested from a kernel that is not C^2."""


class SingularGramError(RuntimeError):
    """Raised when a Gram matrix cannot be factorized even at maximum jitter.

    Usually signals duplicate or near-duplicate centers.
    """


class PEViolationError(RuntimeError):
    """Raised when the assembled coefficient matrix has no usable excitation margin.

    Carries the measured margin so callers can report or log it.
    """

    def __init__(self, message, pe_margin=None, iteration=None):
        super().__init__(message)
        self.pe_margin = pe_margin
        self.iteration = iteration


class NonFiniteError(ValueError):
    """Raised when a NaN or Inf appears in an integrand, assembly, or simulated state."""


class UnstablePolicyError(RuntimeError):
    """Raised when an initial policy fails the stabilization check."""


class ConfigError(ValueError):
    """Raised for malformed configuration files or invalid option values."""
