"""Exception hierarchy shared by all modules."""


class ExpansionError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ExpansionError, ValueError):
    """A point lies in the excluded set of a scalar function."""


class ZeroEigenvalueError(ExpansionError, ValueError):
    pass


class BudgetError(ExpansionError):
    """Requested work exceeds the configured cap."""


class DepthError(ExpansionError):
    pass


class ContourError(ExpansionError):
    """No admissible integration contour exists, or a contour is invalid."""


class ConvergenceError(ExpansionError):
    pass


class SolveError(ExpansionError):
    """A shifted matrix on the contour is numerically singular."""


class RadiusError(ExpansionError):
    pass


class DimensionError(ExpansionError, ValueError):
    pass


class ParseError(ExpansionError, ValueError):
    def __init__(self, message, line=None, token=None):
        self.line = line
        self.token = token
        where = []
        if line is not None:
            where.append(f"line {line}")
        if token is not None:
            where.append(f"token {token}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
