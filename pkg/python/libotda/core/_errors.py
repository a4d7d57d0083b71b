class ValidationError(ValueError):
    """Raised when an input violates a documented precondition"""


class SolverError(RuntimeError):
    """Raised when a solver cannot produce a finite, feasible result"""
