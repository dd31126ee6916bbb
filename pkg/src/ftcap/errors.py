"""Exceptions raised by the numerical routines."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure (not bad arguments)."""


class NotPositiveDefiniteError(NumericalError):
    """Cholesky factorization failed.

    ``pivot`` is the 1-based order of the first leading minor that is not
    positive; ``n`` is the grid size when raised from a sweep.
    """

    def __init__(self, pivot, n=None):
        self.pivot = pivot
        self.n = n
        where = f" (grid size n={n})" if n is not None else ""
        super().__init__(f"matrix not positive definite: pivot {pivot} failed{where}")


class DivergenceError(NumericalError):
    """An integral or series that should converge does not."""


class InsufficientDepthError(NumericalError):
    """The Mercer spectrum is too short for the requested tail tolerance."""

    def __init__(self, message, K_used=None, tail_bound=None):
        self.K_used = K_used
        self.tail_bound = tail_bound
        super().__init__(message)


class TheoremViolation(NumericalError):
    """A computed quantity contradicts a guaranteed inequality."""
