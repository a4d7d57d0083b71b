from typing import Optional, Union

import numpy as np

from libotda.core import (
    CostMatrix,
    EmpiricalMeasure,
    ValidationError,
    as_cost,
    as_measure,
)


class Coupling:
    """Transport plan between two empirical measures

    Parameters
    ----------
    values : array_like, shape=(n_source, n_target)
        Non-negative transported mass.
    row_marginal : EmpiricalMeasure
        Prescribed source weights, length n_source.
    col_marginal : EmpiricalMeasure
        Prescribed target weights, length n_target.
    """

    def __init__(
        self,
        values: np.ndarray,
        row_marginal: Union[EmpiricalMeasure, np.ndarray],
        col_marginal: Union[EmpiricalMeasure, np.ndarray],
    ):
        values = np.array(values, dtype=np.float64)
        row_marginal = as_measure(row_marginal)
        col_marginal = as_measure(col_marginal)
        if values.shape != (row_marginal.n, col_marginal.n):
            raise ValidationError(
                f"Coupling shape {values.shape} does not match marginals "
                f"({row_marginal.n}, {col_marginal.n})"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("Coupling entries must be finite")
        if np.any(values < 0.0):
            raise ValidationError("Coupling entries must be non-negative")
        values.setflags(write=False)
        self._values = values
        self.row_marginal = row_marginal
        self.col_marginal = col_marginal

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    def row_sums(self) -> np.ndarray:
        return self._values.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self._values.sum(axis=0)

    def marginal_violation(self) -> float:
        """Largest absolute deviation of the row/column sums from the marginals"""
        return float(
            max(
                np.max(np.abs(self.row_sums() - self.row_marginal.weights)),
                np.max(np.abs(self.col_sums() - self.col_marginal.weights)),
            )
        )

    def n_nonzero(self) -> int:
        return int(np.count_nonzero(self._values))

    def __repr__(self):
        return f"Coupling(shape={self.shape})"


class SolverReport:
    """Convergence record of an iterative transport solver

    Attributes
    ----------
    iterations : int
        Number of Sinkhorn iterations (summed over outer iterations for the
        class-regularized solver).
    final_marginal_violation : float
        Marginal violation of the returned coupling.
    objective : float
        Objective value of the returned coupling.
    converged : bool
        True if `final_marginal_violation` is within the stopping threshold.
    log_domain : bool
        True if the log-domain iteration produced the returned coupling.
    objective_history : list[float]
        Objective after the initial solve and after each outer iteration
        (class-regularized solver only, else a single entry).
    newton_iterations : int
        Number of Newton refinement steps taken after the scaling iterations.
    """

    def __init__(
        self,
        iterations: int,
        final_marginal_violation: float,
        objective: float,
        converged: bool,
        log_domain: bool = False,
        objective_history: Optional[list[float]] = None,
        newton_iterations: int = 0,
    ):
        self.iterations = int(iterations)
        self.final_marginal_violation = float(final_marginal_violation)
        self.objective = float(objective)
        self.converged = bool(converged)
        self.log_domain = bool(log_domain)
        if objective_history is None:
            objective_history = [self.objective]
        self.objective_history = [float(x) for x in objective_history]
        self.newton_iterations = int(newton_iterations)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_marginal_violation": self.final_marginal_violation,
            "objective": self.objective,
            "converged": self.converged,
            "log_domain": self.log_domain,
            "objective_history": list(self.objective_history),
            "newton_iterations": self.newton_iterations,
        }

    @staticmethod
    def from_dict(data: dict) -> "SolverReport":
        return SolverReport(**data)

    def __repr__(self):
        return (
            f"SolverReport(iterations={self.iterations}, "
            f"converged={self.converged}, "
            f"violation={self.final_marginal_violation:.3g})"
        )


def transport_cost(
    gamma: Union[Coupling, np.ndarray], c: Union[CostMatrix, np.ndarray]
) -> float:
    """Frobenius product <gamma, C> of a plan and a cost matrix"""
    g = gamma.values if isinstance(gamma, Coupling) else np.asarray(gamma, float)
    c = as_cost(c)
    if g.shape != c.shape:
        raise ValidationError(
            f"transport_cost: plan shape {g.shape} != cost shape {c.shape}"
        )
    return float(np.sum(g * c.values))
