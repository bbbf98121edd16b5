"""Exception hierarchy shared by every weightlab module."""


class WeightlabError(Exception):
    """Base class for all weightlab errors."""


class GridRangeError(WeightlabError, IndexError):
    """A cube or index falls outside the grid."""


class ConfigurationError(WeightlabError, ValueError):
    """Inconsistent grid, family or operator configuration."""


class DimensionError(WeightlabError, ValueError):
    """Operation is not defined in the grid's dimension."""


class DomainError(WeightlabError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class DegenerateWeightError(WeightlabError, ValueError):
    """A weight vanishes where the computation needs it strictly positive."""


class HypothesisViolation(WeightlabError, ValueError):
    """A theorem hypothesis fails for the requested configuration."""


class ParseError(WeightlabError, ValueError):
    """Malformed DSL string or grid file."""

    def __init__(self, message, token=None):
        if token is not None:
            message = f"{message}: {token!r}"
        super().__init__(message)
        self.token = token
