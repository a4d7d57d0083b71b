import logging
from typing import Optional, Sequence, Union

import numpy as np
import ot as pot
from scipy.linalg import LinAlgError, cho_factor, cho_solve, lstsq
from scipy.special import entr, logsumexp

from libotda.core import (
    CostMatrix,
    EmpiricalMeasure,
    SolverError,
    ValidationError,
    as_cost,
    as_measure,
)

from ._coupling import Coupling, SolverReport, transport_cost
from ._sinkhorn_params import SinkhornParams

logger = logging.getLogger(__name__)

MeasureLike = Union[EmpiricalMeasure, np.ndarray, Sequence[float]]
CostLike = Union[CostMatrix, np.ndarray]


def _check_problem(mu_s: MeasureLike, mu_t: MeasureLike, c: CostLike):
    mu_s = as_measure(mu_s)
    mu_t = as_measure(mu_t)
    c = as_cost(c)
    if c.shape != (mu_s.n, mu_t.n):
        raise ValidationError(
            f"cost shape {c.shape} does not match measures ({mu_s.n}, {mu_t.n})"
        )
    return mu_s, mu_t, c


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (np.isfinite(lam) and lam > 0.0):
        raise ValidationError(f"lambda must be a positive real, got {lam}")
    return lam


def solve_exact(
    mu_s: MeasureLike,
    mu_t: MeasureLike,
    c: CostLike,
    max_iterations: int = 1000000,
) -> Coupling:
    """Exact optimal transport plan, by network simplex

    Parameters
    ----------
    mu_s : EmpiricalMeasure
        Source weights, length n_source.
    mu_t : EmpiricalMeasure
        Target weights, length n_target.
    c : CostMatrix
        Cost, shape=(n_source, n_target).
    max_iterations : int = 1000000
        Maximum number of network simplex pivots.

    Returns
    -------
    gamma : Coupling
        A vertex of the transport polytope minimizing ``<gamma, C>``; it has at most
        ``n_source + n_target - 1`` non-zero entries.
    """
    mu_s, mu_t, c = _check_problem(mu_s, mu_t, c)
    values, log = pot.emd(
        mu_s.weights,
        mu_t.weights,
        np.ascontiguousarray(c.values),
        numItermax=int(max_iterations),
        log=True,
    )
    if log.get("result_code", 1) != 1:
        raise SolverError(
            f"network simplex did not reach optimality: {log.get('warning')}"
        )
    values = np.maximum(np.asarray(values, dtype=np.float64), 0.0)
    logger.debug("solve_exact: shape=%s, cost=%.12g", c.shape, log.get("cost"))
    return Coupling(values, mu_s, mu_t)


def wasserstein_distance(mu_s: MeasureLike, mu_t: MeasureLike, c: CostLike) -> float:
    """Optimal transport cost ``min <gamma, C>`` over the transport polytope"""
    return transport_cost(solve_exact(mu_s, mu_t, c), c)


def entropic_objective(
    gamma: Union[Coupling, np.ndarray], c: CostLike, lam: float
) -> float:
    """``<gamma, C> - E(gamma) / lambda``, with ``E(gamma) = -sum gamma log gamma``"""
    g = gamma.values if isinstance(gamma, Coupling) else np.asarray(gamma, float)
    return transport_cost(g, c) - float(entr(g).sum()) / float(lam)


# scaling hands over to Newton refinement once the violation stops halving
# within this many iterations
_STALL_WINDOW = 100
_NEWTON_FLOOR = 1e-15
_MAX_HALVINGS = 40


def _scaling_iterations(a, b, K, params, stall_exit):
    """Standard-domain Sinkhorn; returns None if the scalings under/overflow"""
    v = np.ones_like(b)
    last = np.inf
    iterations = 0
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        for iterations in range(1, params.max_iterations + 1):
            u = a / (K @ v)
            v = b / (K.T @ u)
            if not (
                np.all(np.isfinite(u))
                and np.all(np.isfinite(v))
                and np.all(u > 0.0)
                and np.all(v > 0.0)
            ):
                return None
            violation = np.max(np.abs(u * (K @ v) - a))
            if violation < params.stop_threshold:
                break
            if stall_exit and iterations % _STALL_WINDOW == 0:
                if violation > 0.5 * last:
                    break
                last = violation
    return np.log(v), iterations


def _log_domain_iterations(a, b, log_K, params, stall_exit):
    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros_like(a)
    g = np.zeros_like(b)
    last = np.inf
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        f = log_a - logsumexp(log_K + g[np.newaxis, :], axis=1)
        g = log_b - logsumexp(log_K + f[:, np.newaxis], axis=0)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise SolverError(
                f"log-domain Sinkhorn produced non-finite potentials at iteration "
                f"{iterations}"
            )
        log_plan = log_K + f[:, np.newaxis] + g[np.newaxis, :]
        violation = np.max(np.abs(np.exp(logsumexp(log_plan, axis=1)) - a))
        if violation < params.stop_threshold:
            break
        if stall_exit and iterations % _STALL_WINDOW == 0:
            if violation > 0.5 * last:
                break
            last = violation
    return g, iterations


def _row_normalized_plan(log_K, log_a, g):
    """Plan ``exp(log_K + f + g)`` with `f` chosen so the row sums equal ``a``"""
    f = log_a - logsumexp(log_K + g[np.newaxis, :], axis=1)
    return np.exp(log_K + f[:, np.newaxis] + g[np.newaxis, :])


def _grounded_solve(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return cho_solve(cho_factor(A), rhs)
    except LinAlgError:
        return lstsq(A, rhs)[0]


def _newton_refinement(log_K, a, b, g, max_steps):
    """Damped Newton on the dual with the row potentials eliminated

    The column residual ``P.sum(axis=0) - b`` is the gradient of the convex function
    ``sum_i a_i logsumexp_j(log_K_ij + g_j) - <b, g>``. Its Hessian is the graph
    Laplacian with weights ``W_jk = sum_i P_ij P_ik / a_i``; it is assembled in that
    form, so that entries of near-permutation plans keep their relative accuracy.
    The last potential is held fixed, which removes the constant null direction.

    Returns
    -------
    plan : np.ndarray
        Row-normalized plan at the refined potentials.
    steps : int
        Number of accepted Newton steps.
    """
    log_a = np.log(a)
    plan = _row_normalized_plan(log_K, log_a, g)
    residual = plan.sum(axis=0) - b
    norm = np.linalg.norm(residual)
    steps = 0
    if b.size < 2:
        return plan, steps
    while steps < max_steps and np.max(np.abs(residual)) > _NEWTON_FLOOR:
        W = plan.T @ (plan / a[:, np.newaxis])
        np.fill_diagonal(W, 0.0)
        H = np.diag(W.sum(axis=1)) - W
        direction = np.zeros_like(g)
        direction[:-1] = _grounded_solve(H[:-1, :-1], -residual[:-1])
        if not np.all(np.isfinite(direction)):
            break

        t = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = g + t * direction
            trial_plan = _row_normalized_plan(log_K, log_a, trial)
            trial_residual = trial_plan.sum(axis=0) - b
            trial_norm = np.linalg.norm(trial_residual)
            if trial_norm < (1.0 - 1e-4 * t) * norm:
                break
            t *= 0.5
        else:
            # no decrease: the residual is at rounding level
            break
        g, plan, residual, norm = trial, trial_plan, trial_residual, trial_norm
        steps += 1
    return plan, steps


def solve_entropic(
    mu_s: MeasureLike,
    mu_t: MeasureLike,
    c: CostLike,
    lam: float,
    params: Optional[SinkhornParams] = None,
) -> tuple[Coupling, SolverReport]:
    """Entropy-regularized optimal transport, by Sinkhorn scaling

    Minimizes ``<gamma, C> - E(gamma) / lambda`` over the transport polytope by
    alternately scaling the rows and columns of the kernel ``exp(-lambda * C)``.
    Scaling stops at ``params.stop_threshold``, after ``params.max_iterations``, or
    when its progress stalls; the dual potentials are then refined by Newton steps
    (see :class:`SinkhornParams`). Sinkhorn alone converges slowly for large
    ``lambda * C``; the refinement converges quadratically.

    Rows and columns with zero weight get zero mass and take no part in the
    iterations.

    Parameters
    ----------
    mu_s : EmpiricalMeasure
        Source weights.
    mu_t : EmpiricalMeasure
        Target weights.
    c : CostMatrix
        Cost, shape=(n_source, n_target).
    lam : float
        Regularization strength, > 0. Large values approach the exact plan, small
        values approach the independent coupling ``mu_s mu_t^T``.
    params : Optional[SinkhornParams] = None
        Stopping rule and numerical options. If None, the defaults are used.

    Returns
    -------
    gamma : Coupling
        The regularized plan.
    report : SolverReport
        Iteration counts, marginal violation, objective and convergence flag.
    """
    mu_s, mu_t, c = _check_problem(mu_s, mu_t, c)
    lam = _check_lambda(lam)
    if params is None:
        params = SinkhornParams()
    if params.normalize_cost:
        c = c.normalized()
    rows = mu_s.weights > 0.0
    cols = mu_t.weights > 0.0
    a = mu_s.weights[rows]
    b = mu_t.weights[cols]
    log_K = -lam * c.values[np.ix_(rows, cols)]
    refine = params.newton_iterations > 0

    result = None
    log_domain = lam * c.max() > params.log_domain_threshold
    if not log_domain:
        result = _scaling_iterations(a, b, np.exp(log_K), params, refine)
        if result is None:
            logger.debug("solve_entropic: scaling vectors left float range")
            log_domain = True
    if log_domain:
        result = _log_domain_iterations(a, b, log_K, params, refine)
    g, iterations = result

    newton_steps = 0
    if refine:
        plan, newton_steps = _newton_refinement(
            log_K, a, b, g, params.newton_iterations
        )
    else:
        plan = _row_normalized_plan(log_K, np.log(a), g)
    if not np.all(np.isfinite(plan)):
        raise SolverError("Sinkhorn produced a non-finite coupling")
    values = np.zeros(c.shape)
    values[np.ix_(rows, cols)] = plan

    gamma = Coupling(values, mu_s, mu_t)
    violation = gamma.marginal_violation()
    converged = violation <= params.stop_threshold
    if not converged:
        logger.warning(
            "solve_entropic: not converged after %d iterations and %d Newton steps "
            "(violation=%.3g)",
            iterations,
            newton_steps,
            violation,
        )
    report = SolverReport(
        iterations=iterations,
        final_marginal_violation=violation,
        objective=entropic_objective(gamma, c, lam),
        converged=converged,
        log_domain=log_domain,
        newton_iterations=newton_steps,
    )
    logger.debug("solve_entropic: lambda=%g, %s", lam, report)
    return gamma, report


def class_regularizer(
    gamma: Union[Coupling, np.ndarray],
    source_labels: Sequence,
    epsilon: float = 0.0,
) -> float:
    """Group-sparsity penalty ``sum_j sum_L sqrt(sum_{i in L} gamma_ij + epsilon)``

    Parameters
    ----------
    gamma : Coupling
        Transport plan, shape=(n_source, n_target).
    source_labels : array_like
        Class of each source row.
    epsilon : float = 0.0
        Smoothing added to each group mass before the square root.
    """
    g = gamma.values if isinstance(gamma, Coupling) else np.asarray(gamma, float)
    labels = np.asarray(source_labels)
    if labels.shape != (g.shape[0],):
        raise ValidationError(
            f"{labels.size} source labels for {g.shape[0]} coupling rows"
        )
    _, inverse = np.unique(labels, return_inverse=True)
    return float(np.sqrt(_group_mass(g, inverse) + epsilon).sum())


def _group_mass(g: np.ndarray, inverse: np.ndarray) -> np.ndarray:
    """Mass per (class, target column), shape=(n_classes, n_target)"""
    n_classes = int(inverse.max()) + 1
    group = np.zeros((n_classes, g.shape[1]))
    np.add.at(group, inverse, g)
    return group


def solve_class_regularized(
    mu_s: MeasureLike,
    mu_t: MeasureLike,
    c: CostLike,
    source_labels: Sequence,
    lam: float,
    eta: float,
    n_outer_iterations: int = 10,
    params: Optional[SinkhornParams] = None,
    group_epsilon: float = 1e-12,
) -> tuple[Coupling, SolverReport]:
    """Entropic optimal transport with a class-based group-sparsity penalty

    Minimizes ``<gamma, C> - E(gamma) / lambda + eta * Omega(gamma)``, where
    ``Omega(gamma) = sum_j sum_L ||gamma(I_L, j)||_1^(1/2)`` sums over target columns j
    and source classes L. The concave penalty is handled by
    majorization-minimization: each outer iteration linearizes ``Omega`` at the
    current plan and solves an entropic problem with the adjusted cost
    ``C + eta * G``, ``G_ij = 0.5 * (||gamma(I_L(i), j)||_1 + group_epsilon)^(-1/2)``.

    Parameters
    ----------
    mu_s, mu_t : EmpiricalMeasure
        Source and target weights.
    c : CostMatrix
        Cost, shape=(n_source, n_target).
    source_labels : array_like
        Class of each source row, length n_source.
    lam : float
        Entropic regularization strength, > 0.
    eta : float
        Class regularization weight, >= 0. ``eta = 0`` reduces to
        :func:`solve_entropic`.
    n_outer_iterations : int = 10
        Number of majorization-minimization steps.
    params : Optional[SinkhornParams] = None
        Options of the inner Sinkhorn solves.
    group_epsilon : float = 1e-12
        Smoothing of the group masses in the linearization and in the reported
        objective.

    Returns
    -------
    gamma : Coupling
        The regularized plan.
    report : SolverReport
        `objective_history` holds the full objective after the initial entropic
        solve and after each outer iteration; it is non-increasing up to the inner
        solver accuracy.
    """
    mu_s, mu_t, c = _check_problem(mu_s, mu_t, c)
    lam = _check_lambda(lam)
    eta = float(eta)
    if not (np.isfinite(eta) and eta >= 0.0):
        raise ValidationError(f"eta must be a non-negative real, got {eta}")
    labels = np.asarray(source_labels)
    if labels.shape != (mu_s.n,):
        raise ValidationError(
            f"{labels.size} source labels for {mu_s.n} source points"
        )
    if params is None:
        params = SinkhornParams()
    if params.normalize_cost:
        c = c.normalized()
    inner_params = params.copy(normalize_cost=False)
    _, inverse = np.unique(labels, return_inverse=True)

    def objective(g: np.ndarray) -> float:
        penalty = float(np.sqrt(_group_mass(g, inverse) + group_epsilon).sum())
        return entropic_objective(g, c, lam) + eta * penalty

    gamma, report = solve_entropic(mu_s, mu_t, c, lam, inner_params)
    history = [objective(gamma.values)]
    iterations = report.iterations
    newton_steps = report.newton_iterations
    for step in range(int(n_outer_iterations)):
        group = _group_mass(gamma.values, inverse)
        G = 0.5 / np.sqrt(group[inverse] + group_epsilon)
        adjusted = CostMatrix(c.values + eta * G)
        gamma, report = solve_entropic(mu_s, mu_t, adjusted, lam, inner_params)
        iterations += report.iterations
        newton_steps += report.newton_iterations
        history.append(objective(gamma.values))
        logger.debug(
            "solve_class_regularized: step %d, objective=%.15g", step + 1, history[-1]
        )

    return gamma, SolverReport(
        iterations=iterations,
        final_marginal_violation=report.final_marginal_violation,
        objective=history[-1],
        converged=report.converged,
        log_domain=report.log_domain,
        objective_history=history,
        newton_iterations=newton_steps,
    )
