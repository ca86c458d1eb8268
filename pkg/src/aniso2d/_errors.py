"""Error hierarchy for the aniso2d library.

Two broad classes matter to callers (and to the CLI's exit codes):

* usage errors -- the request itself is malformed or asks for an operation
  outside its defined branch (bad exponent, wrong mode, unsupported symmetry);
* numerical errors -- the request is well-formed but the computation cannot
  deliver (regime not applicable, divergent integral, iteration failure).
"""


class AnisoError(Exception):
    """Base class for all library-specific errors."""


class DomainError(AnisoError, ValueError):
    """A parameter lies outside the mathematical domain of the operation."""


class BranchError(AnisoError, ValueError):
    """The operation is not defined on this exponent/symmetry branch."""


class InvalidInputError(AnisoError, ValueError):
    """Structurally invalid input (bad mode, malformed grid, mass mismatch)."""


class RegimeError(AnisoError):
    """The potential is not in a regime where the requested object exists."""


class DivergenceError(AnisoError):
    """A requested quantity is genuinely divergent (e.g. a degenerate-limit
    coefficient whose integrand is not integrable)."""

    def __init__(self, message, coefficient=None):
        super().__init__(message)
        self.coefficient = coefficient


class NumericalError(AnisoError):
    """An iteration, bracket search, or fit failed to converge."""
