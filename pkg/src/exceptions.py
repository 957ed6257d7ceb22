"""Custom exceptions for the multiobjective CG solver."""

from typing import Optional


class MocgError(Exception):
    """Base exception for all solver errors."""

    pass


class DimensionMismatchError(MocgError, ValueError):
    """Raised when a point, direction or matrix has the wrong shape."""


class EvaluationError(MocgError):
    """Raised when an objective or gradient evaluation is not finite."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class CatalogError(MocgError, KeyError):
    """Raised when a problem cannot be built from the catalog"""

    def __str__(self) -> str:
        # KeyError quotes its argument
        return str(self.args[0]) if self.args else ""


class SubproblemError(MocgError):
    """Base exception for all issues related to the steepest descent subproblem"""


class SubproblemSolverError(SubproblemError):
    """Raised when the dual solver does not reach the duality gap tolerance."""

    def __init__(self, message: str, best_dual: float, gap: float):
        super().__init__(message)
        self.best_dual = best_dual
        self.gap = gap


class OracleScopeError(SubproblemError, ValueError):
    """Raise when the brute-force oracle is asked for too many objectives"""


class StepsizeError(MocgError):
    """Base exception for stepsize selection"""


class ContractViolationError(StepsizeError, ValueError):
    """Raised when a stepsize formula is called outside its contract."""


class NotDescentDirectionError(StepsizeError, ValueError):
    """Raised when a line search receives a direction with psi(x, d) >= 0."""


class InconsistentPointsError(StepsizeError, ValueError):
    """Raised when x_k1 is not x_k + t * d."""


class LineSearchError(StepsizeError):
    """Raised when no Wolfe step is found within the evaluation budget."""

    def __init__(self, message: str, func_evals: int = 0, jac_evals: int = 0):
        super().__init__(message)
        self.func_evals = func_evals
        self.jac_evals = jac_evals


class DirectionError(MocgError, ValueError):
    """Raised for invalid direction updates and beta rules."""


class SolverError(MocgError):
    """Base exception for the iteration driver"""


class DomainExitError(SolverError):
    """Raised when an iterate leaves the declared box domain."""


class ConfigError(MocgError):
    """Raised for unreadable or schema-invalid run configuration files."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line
