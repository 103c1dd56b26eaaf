"""Exception types shared across the library.

Invalid arguments raise plain ``ValueError``; the classes below cover the
two failure modes that deserve their own type.
"""


class NumericFailureError(RuntimeError):
    """An iterative numeric routine failed to converge or hit a non-finite value."""


class SingularDesignError(ValueError):
    """A design matrix is rank deficient where full column rank is required."""

    def __init__(self, message, deficient_columns=0):
        super().__init__(message)
        self.deficient_columns = deficient_columns
