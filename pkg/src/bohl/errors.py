"""Exception hierarchy shared by the lattice and continuum modules."""


class BohlError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(BohlError, ValueError):
    """Malformed or out-of-range input (short window, bad grid, C <= 0, ...)."""


class HypothesisError(BohlError, ValueError):
    """A mathematical hypothesis of the requested construction is not met."""


class ConsistencyError(BohlError):
    """A quantity that must be constant or exact was not, beyond tolerance."""


class DependentSolutionsError(BohlError, ValueError):
    """Two solutions have vanishing Wronskian."""


class PositivityError(HypothesisError):
    """A solution that must stay positive changed sign on the window."""


class DiagonalDegenerateError(BohlError, ValueError):
    """The Green diagonal (or u1*u2) vanishes, so the transformation is undefined."""


class ConjugateDependenceError(BohlError, ValueError):
    """A complex solution is a constant multiple of its own conjugate."""


class SingularSystemError(BohlError, ArithmeticError):
    """The tridiagonal oracle system has a (near-)zero pivot."""

    def __init__(self, message, index=None, pivot=None):
        super().__init__(message)
        self.index = index
        self.pivot = pivot
