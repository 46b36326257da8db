"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when user-supplied data or configuration violates a precondition."""


class CovarianceNotPD(RuntimeError):
    """Raised when a target autocovariance is numerically not positive definite."""
