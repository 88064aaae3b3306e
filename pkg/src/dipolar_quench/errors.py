"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class InstabilityError(ArithmeticError):
    """The Bogoliubov frequency became imaginary.

    ``k`` holds the (first) offending dimensionless momentum.
    """

    def __init__(self, k, message=None):
        self.k = float(k)
        if message is None:
            message = f"imaginary Bogoliubov frequency at k = {self.k:.10g}"
        super().__init__(message)


class ToleranceError(ArithmeticError):
    """The mode integrator could not meet its accuracy target."""
