"""Exception types shared across the package."""


class LongmemError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(LongmemError, ValueError):
    """An argument is outside the domain of the operation."""


class InvalidDesignError(LongmemError, ValueError):
    """A sample-size / bandwidth / Monte Carlo design is infeasible."""


class DegenerateInputError(LongmemError, ValueError):
    """The data carry no usable signal (e.g. a constant series)."""


class NumericalDegeneracyError(LongmemError, ArithmeticError):
    """A numerical procedure hit a degenerate configuration.

    Raised e.g. when a Toeplitz system is not positive definite, a
    reflection coefficient reaches the unit boundary, or a regression
    design is rank deficient.
    """


class EstimationFailedError(LongmemError, RuntimeError):
    """An estimator or optimizer failed to produce a usable value."""
