"""Exception hierarchy shared by every module."""


class SlitwallError(Exception):
    """Base class for all errors raised by slitwall."""


class ContractViolation(SlitwallError, ValueError):
    """An argument breaks an operation's precondition."""


class NumericalError(SlitwallError):
    """The discretization cannot represent the requested state faithfully."""


class GridTooSmall(NumericalError):
    """A state does not decay at the grid edges (wrap-around risk)."""


class GridTooCoarse(NumericalError):
    """The grid spacing does not resolve the narrowest feature of a state."""


class OutcomeUnreachable(NumericalError):
    """Conditioning on an outcome of (numerically) zero probability."""


class InternalConsistencyError(SlitwallError):
    """Two routes to the same quantity disagree beyond tolerance."""


class ConfigError(SlitwallError):
    """A scenario file failed validation; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
