"""libotda.ot: exact, entropic and class-regularized optimal transport"""
from ._coupling import Coupling, SolverReport, transport_cost
from ._sinkhorn_params import SinkhornParams
from ._solvers import (
    class_regularizer,
    entropic_objective,
    solve_class_regularized,
    solve_entropic,
    solve_exact,
    wasserstein_distance,
)
