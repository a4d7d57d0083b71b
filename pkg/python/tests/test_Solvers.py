import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

import libotda.core as core
import libotda.ot as ot


def random_problem(rng, n_s, n_t, low=0.0, high=1.0):
    c = rng.uniform(low, high, size=(n_s, n_t))
    return core.uniform_measure(n_s), core.uniform_measure(n_t), core.CostMatrix(c)


def brute_force_assignment(c):
    n = c.shape[0]
    return min(
        sum(c[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n))
    )


def test_solve_exact_1():
    gamma = ot.solve_exact([1.0], [1.0], [[0.0]])
    assert gamma.values.tolist() == [[1.0]]
    assert ot.transport_cost(gamma, [[0.0]]) == 0.0


def test_solve_exact_2():
    s = core.DataMatrix([[0.0], [1.0]])
    c = core.squared_euclidean_cost(s, s)
    mu = core.uniform_measure(2)
    gamma = ot.solve_exact(mu, mu, c)
    assert np.allclose(gamma.values, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)
    assert ot.wasserstein_distance(mu, mu, c) == 0.0


def test_solve_exact_oracle_1():
    rng = np.random.default_rng(0)
    for trial in range(200):
        n = int(rng.integers(1, 9))
        mu_s, mu_t, c = random_problem(rng, n, n)
        gamma = ot.solve_exact(mu_s, mu_t, c)
        rows, cols = linear_sum_assignment(c.values)
        optimum = c.values[rows, cols].sum() / n
        assert math.isclose(ot.transport_cost(gamma, c), optimum, abs_tol=1e-9)


def test_solve_exact_oracle_2():
    rng = np.random.default_rng(1)
    for trial in range(20):
        mu_s, mu_t, c = random_problem(rng, 5, 5)
        gamma = ot.solve_exact(mu_s, mu_t, c)
        optimum = brute_force_assignment(c.values) / 5
        assert math.isclose(ot.transport_cost(gamma, c), optimum, abs_tol=1e-9)


def test_solve_exact_vertex_1():
    rng = np.random.default_rng(2)
    for trial in range(20):
        n_s, n_t = (int(x) for x in rng.integers(1, 15, size=2))
        mu_s, mu_t, c = random_problem(rng, n_s, n_t)
        gamma = ot.solve_exact(mu_s, mu_t, c)
        assert gamma.n_nonzero() <= n_s + n_t - 1


def test_solve_exact_scaling_1():
    rng = np.random.default_rng(3)
    for trial in range(20):
        mu_s, mu_t, c = random_problem(rng, 6, 9)
        gamma = ot.solve_exact(mu_s, mu_t, c)
        scaled = core.CostMatrix(7.5 * c.values)
        assert math.isclose(
            ot.transport_cost(gamma, scaled),
            ot.wasserstein_distance(mu_s, mu_t, scaled),
            abs_tol=1e-9,
        )


def test_feasibility_1():
    rng = np.random.default_rng(4)
    for trial in range(200):
        n_s, n_t = (int(x) for x in rng.integers(1, 31, size=2))
        mu_s, mu_t, c = random_problem(rng, n_s, n_t)

        gamma = ot.solve_exact(mu_s, mu_t, c)
        assert gamma.marginal_violation() <= 1e-12

        for lam in [0.1, 1.0, 10.0, 100.0]:
            gamma, report = ot.solve_entropic(mu_s, mu_t, c, lam)
            assert gamma.marginal_violation() <= 1e-9
            assert report.converged
            assert np.all(gamma.values >= 0.0)


def test_feasibility_2():
    rng = np.random.default_rng(14)
    for trial in range(200):
        n_s, n_t = (int(x) for x in rng.integers(2, 31, size=2))
        mu_s, mu_t, c = random_problem(rng, n_s, n_t)
        labels = rng.integers(0, 3, size=n_s)
        lam = [0.1, 1.0, 10.0, 100.0][trial % 4]
        gamma, report = ot.solve_class_regularized(
            mu_s, mu_t, c, labels, lam=lam, eta=0.1
        )
        assert gamma.marginal_violation() <= 1e-6
        assert np.all(gamma.values >= 0.0)
        assert len(report.objective_history) == 11

def test_solve_entropic_1():
    # zero cost: entropy alone, independent coupling
    mu_s = core.EmpiricalMeasure([0.2, 0.3, 0.5])
    mu_t = core.EmpiricalMeasure([0.6, 0.4])
    gamma, report = ot.solve_entropic(mu_s, mu_t, np.zeros((3, 2)), 5.0)
    assert np.allclose(gamma.values, np.outer(mu_s.weights, mu_t.weights), atol=1e-12)
    assert report.converged
    assert report.iterations >= 1


def test_solve_entropic_2():
    rng = np.random.default_rng(5)
    mu_s, mu_t, c = random_problem(rng, 6, 4)
    gamma, report = ot.solve_entropic(mu_s, mu_t, c, 1e-6)
    assert np.allclose(
        gamma.values, np.outer(mu_s.weights, mu_t.weights), rtol=0.0, atol=1e-4
    )


def test_solve_entropic_sandwich_1():
    rng = np.random.default_rng(6)
    for trial in range(50):
        mu_s, mu_t, c = random_problem(rng, 8, 8)
        exact = ot.wasserstein_distance(mu_s, mu_t, c)
        costs = []
        for lam in [0.1, 1.0, 10.0, 100.0]:
            gamma, report = ot.solve_entropic(mu_s, mu_t, c, lam)
            costs.append(ot.transport_cost(gamma, c))
            assert costs[-1] >= exact - 1e-9
            # the entropic plan costs at most log(8) / lam above the optimum
            assert costs[-1] <= exact + math.log(8) / lam + 1e-9
        for a, b in zip(costs[:-1], costs[1:]):
            assert b <= a + 1e-9


def test_solve_entropic_refinement_1():
    # scaling alone stalls here; Newton refinement reaches the marginals
    rng = np.random.default_rng(15)
    for trial in range(50):
        mu_s, mu_t, c = random_problem(rng, 8, 8, low=1.0, high=5.0)
        gamma, report = ot.solve_entropic(mu_s, mu_t, c, 100.0)
        assert report.converged
        assert report.final_marginal_violation <= 1e-9
        assert gamma.marginal_violation() <= 1e-9


def test_solve_entropic_refinement_2():
    # zero-weight points get no mass and do not block convergence
    mu_s = core.EmpiricalMeasure([0.5, 0.0, 0.5])
    mu_t = core.EmpiricalMeasure([0.25, 0.25, 0.0, 0.5])
    rng = np.random.default_rng(16)
    c = rng.uniform(size=(3, 4))
    gamma, report = ot.solve_entropic(mu_s, mu_t, c, 50.0)
    assert report.converged
    assert np.all(gamma.values[1] == 0.0)
    assert np.all(gamma.values[:, 2] == 0.0)
    assert gamma.marginal_violation() <= 1e-9

def test_solve_entropic_log_domain_1():
    rng = np.random.default_rng(7)
    mu_s, mu_t, c = random_problem(rng, 5, 5, high=1000.0)
    gamma, report = ot.solve_entropic(mu_s, mu_t, c, 1.0)
    assert report.log_domain
    assert np.all(np.isfinite(gamma.values))
    assert gamma.marginal_violation() <= 1e-9
    assert report.converged
    assert ot.transport_cost(gamma, c) >= ot.wasserstein_distance(mu_s, mu_t, c) - 1e-6


def test_solve_entropic_normalize_cost_1():
    rng = np.random.default_rng(8)
    mu_s, mu_t, c = random_problem(rng, 4, 6, high=10.0)
    params = ot.SinkhornParams(normalize_cost=True)
    a, _ = ot.solve_entropic(mu_s, mu_t, c, 3.0, params)
    b, _ = ot.solve_entropic(mu_s, mu_t, c.normalized(), 3.0)
    assert np.array_equal(a.values, b.values)


def test_solve_entropic_errors_1():
    mu = core.uniform_measure(2)
    with pytest.raises(core.ValidationError, match="lambda"):
        ot.solve_entropic(mu, mu, np.zeros((2, 2)), 0.0)
    with pytest.raises(core.ValidationError, match="cost shape"):
        ot.solve_entropic(mu, mu, np.zeros((2, 3)), 1.0)


def test_solve_entropic_report_1():
    rng = np.random.default_rng(9)
    mu_s, mu_t, c = random_problem(rng, 4, 4)
    params = ot.SinkhornParams(max_iterations=1, newton_iterations=0)
    gamma, report = ot.solve_entropic(mu_s, mu_t, c, 50.0, params)
    assert report.iterations == 1
    assert report.newton_iterations == 0
    assert report.converged == (report.final_marginal_violation <= 1e-9)

    # refinement recovers the marginals after a single scaling step
    gamma, report = ot.solve_entropic(
        mu_s, mu_t, c, 50.0, ot.SinkhornParams(max_iterations=1)
    )
    assert report.iterations == 1
    assert report.converged
    assert gamma.marginal_violation() <= 1e-9
    assert math.isclose(report.objective, ot.entropic_objective(gamma, c, 50.0))


def test_solve_class_regularized_1():
    # eta = 0 disables the class term
    rng = np.random.default_rng(10)
    mu_s, mu_t, c = random_problem(rng, 6, 5)
    labels = [0, 0, 1, 1, 2, 2]
    a, _ = ot.solve_entropic(mu_s, mu_t, c, 2.0)
    b, report = ot.solve_class_regularized(mu_s, mu_t, c, labels, lam=2.0, eta=0.0)
    assert np.max(np.abs(a.values - b.values)) <= 1e-9
    assert len(report.objective_history) == 11


def test_solve_class_regularized_2():
    # a single class makes the class term constant on the transport polytope
    rng = np.random.default_rng(11)
    for trial in range(5):
        mu_s, mu_t, c = random_problem(rng, 5, 7)
        a, _ = ot.solve_entropic(mu_s, mu_t, c, 2.0)
        b, _ = ot.solve_class_regularized(mu_s, mu_t, c, [3] * 5, lam=2.0, eta=1.0)
        assert np.max(np.abs(a.values - b.values)) <= 1e-9


def test_solve_class_regularized_3():
    # two classes competing for the same target points
    s = core.DataMatrix([[0.0], [0.1], [1.0], [1.1]])
    t = core.DataMatrix([[0.05], [0.5], [0.55], [1.05]])
    labels = [0, 0, 1, 1]
    mu = core.uniform_measure(4)
    c = core.squared_euclidean_cost(s, t)

    entropic, _ = ot.solve_entropic(mu, mu, c, 10.0)
    regularized, report = ot.solve_class_regularized(
        mu, mu, c, labels, lam=10.0, eta=1.0
    )
    omega_entropic = ot.class_regularizer(entropic, labels, epsilon=1e-12)
    omega_regularized = ot.class_regularizer(regularized, labels, epsilon=1e-12)
    assert omega_regularized <= omega_entropic + 1e-8
    assert math.isclose(report.objective, report.objective_history[-1])


def test_solve_class_regularized_descent_1():
    rng = np.random.default_rng(12)
    for trial in range(20):
        n_s = int(rng.integers(4, 9))
        n_t = int(rng.integers(3, 9))
        mu_s, mu_t, c = random_problem(rng, n_s, n_t)
        labels = rng.integers(0, 3, size=n_s)
        gamma, report = ot.solve_class_regularized(
            mu_s, mu_t, c, labels, lam=5.0, eta=0.1
        )
        history = report.objective_history
        assert len(history) == 11
        for a, b in zip(history[:-1], history[1:]):
            assert b <= a + 1e-9


def test_solve_class_regularized_errors_1():
    mu = core.uniform_measure(2)
    with pytest.raises(core.ValidationError, match="eta"):
        ot.solve_class_regularized(mu, mu, np.zeros((2, 2)), [0, 1], 1.0, -1.0)
    with pytest.raises(core.ValidationError, match="labels"):
        ot.solve_class_regularized(mu, mu, np.zeros((2, 2)), [0], 1.0, 1.0)


def test_class_regularizer_1():
    gamma = np.array([[0.25, 0.0], [0.25, 0.0], [0.0, 0.5]])
    # class 0 rows {0, 1}: column masses 0.5, 0; class 1 row {2}: 0, 0.5
    assert math.isclose(
        ot.class_regularizer(gamma, [0, 0, 1]), 2.0 * math.sqrt(0.5)
    )


def test_transport_cost_1():
    assert ot.transport_cost([[1.0]], [[7.0]]) == 7.0
    assert ot.transport_cost(0.5 * np.eye(2), [[0.0, 3.0], [2.0, 0.0]]) == 0.0

    rng = np.random.default_rng(13)
    g = rng.random((5, 5))
    c = rng.random((5, 5))
    expected = 0.0
    for i in range(5):
        for j in range(5):
            expected += g[i, j] * c[i, j]
    assert math.isclose(ot.transport_cost(g, c), expected, rel_tol=1e-12)

    with pytest.raises(core.ValidationError):
        ot.transport_cost(np.ones((2, 2)), np.ones((2, 3)))


def test_Coupling_1():
    gamma = ot.Coupling([[0.5, 0.0], [0.0, 0.5]], [0.5, 0.5], [0.5, 0.5])
    assert gamma.marginal_violation() == 0.0
    assert gamma.n_nonzero() == 2
    with pytest.raises(core.ValidationError):
        ot.Coupling([[-0.1, 0.6], [0.6, -0.1]], [0.5, 0.5], [0.5, 0.5])
    with pytest.raises(core.ValidationError):
        ot.Coupling([[1.0]], [0.5, 0.5], [1.0])
