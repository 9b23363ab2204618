"""Exception hierarchy shared by every package.

Domain errors subclass ``ValueError`` so callers catching ``ValueError`` keep
working; data loading problems are kept apart so the CLI can map them to a
different exit code.
"""


class EstimationError(ValueError):
    """A precondition of an estimator, oracle or model was violated."""


class DimensionError(EstimationError):
    """Array shapes do not agree with the model dimension."""


class NotPositiveDefiniteError(EstimationError):
    """A scale matrix failed its Cholesky factorization."""


class DegenerateConditionalError(EstimationError):
    """The conditional scale sigma_{Y|X} is zero up to tolerance."""


class OrderStatisticError(EstimationError):
    """An order statistic index is out of range or the statistic is not positive."""


class ExistenceError(EstimationError):
    """A risk measure or conversion factor does not exist for the tail index."""


class BracketError(EstimationError):
    """A numeric root or minimum could not be bracketed."""


class UnsupportedFamilyError(EstimationError):
    """The generator family does not support the requested operation."""


class DataFormatError(Exception):
    """Input data is empty, malformed or missing required columns."""
