"""Exception types shared across the package."""


class NotHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class NoConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain."""


class DimensionMismatchError(ValueError):
    """Declared subsystem dimensions do not match the matrix."""


class InvalidRankError(ValueError):
    """Requested rank is outside [1, dim]."""


class InvalidDistributionError(ValueError):
    """Weights do not form a valid (sub)normalized distribution."""


class AlphaOutOfRangeError(ValueError):
    """Renyi order outside the domain of the requested divergence."""


class SupportViolationError(ValueError):
    """supp(rho) is not contained in supp(sigma)."""


class DivergenceInfiniteError(ValueError):
    """A divergence required to be finite evaluated to infinity."""


class NotClassicalRegisterError(ValueError):
    """The named subsystem is not diagonal (classical) in its basis."""


class GammaOutOfRangeError(ValueError):
    """Testing probability outside (0, 1]."""
