"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input: schema violations, broken invariants, invalid indices."""


class NumericError(ArithmeticError):
    """A numeric contract was violated during computation."""
