import numpy as np
import pytest

import libotda.core as core
import libotda.mapping as mapping
import libotda.ot as ot


def test_barycentric_map_1():
    mu = core.uniform_measure(2)
    gamma = ot.Coupling(0.5 * np.eye(2), mu, mu)
    target = core.DataMatrix([[1.0, 0.0], [0.0, 1.0]])
    adapted = mapping.barycentric_map(gamma, target)
    assert np.allclose(adapted.values, target.values, atol=1e-15)


def test_barycentric_map_2():
    rng = np.random.default_rng(0)
    target = core.DataMatrix(rng.normal(size=(5, 3)))
    mu_s = core.uniform_measure(4)
    mu_t = core.uniform_measure(5)
    gamma = ot.Coupling(np.outer(mu_s.weights, mu_t.weights), mu_s, mu_t)
    adapted = mapping.barycentric_map(gamma, target, labels=[0, 1, 0, 1])
    assert adapted.shape == (4, 3)
    assert adapted.labels.tolist() == [0, 1, 0, 1]
    for row in adapted.values:
        assert np.allclose(row, target.values.mean(axis=0), atol=1e-12)


def test_barycentric_map_uniform_1():
    # with uniform row marginals the row-normalized map is n_source * gamma @ T
    rng = np.random.default_rng(1)
    s = core.DataMatrix(rng.normal(size=(6, 2)))
    t = core.DataMatrix(rng.normal(size=(9, 2)))
    mu_s = core.uniform_measure(6)
    mu_t = core.uniform_measure(9)
    gamma = ot.solve_exact(mu_s, mu_t, core.squared_euclidean_cost(s, t))
    adapted = mapping.barycentric_map(gamma, t)
    expected = 6 * gamma.values @ t.values
    assert np.allclose(adapted.values, expected, rtol=0, atol=1e-12)


def test_barycentric_map_hull_1():
    rng = np.random.default_rng(2)
    for trial in range(10):
        s = core.DataMatrix(rng.normal(size=(7, 3)))
        t = core.DataMatrix(rng.normal(size=(11, 3)))
        mu_s = core.uniform_measure(7)
        mu_t = core.uniform_measure(11)
        gamma = ot.solve_exact(mu_s, mu_t, core.squared_euclidean_cost(s, t))
        adapted = mapping.barycentric_map(gamma, t).values
        assert np.all(adapted >= t.values.min(axis=0) - 1e-12)
        assert np.all(adapted <= t.values.max(axis=0) + 1e-12)


def test_barycentric_map_identity_1():
    rng = np.random.default_rng(3)
    s = core.DataMatrix(rng.normal(size=(8, 4)), feature_names=list("abcd"))
    mu = core.uniform_measure(8)
    gamma = ot.solve_exact(mu, mu, core.squared_euclidean_cost(s, s))
    before = gamma.values.copy()
    adapted = mapping.barycentric_map(gamma, s)
    assert np.allclose(adapted.values, s.values, rtol=0, atol=1e-9)
    assert adapted.feature_names == ["a", "b", "c", "d"]
    assert np.array_equal(gamma.values, before)


def test_barycentric_map_errors_1():
    target = core.DataMatrix([[1.0], [2.0]])
    with pytest.raises(core.ValidationError, match="row 1"):
        mapping.barycentric_map(np.array([[0.5, 0.5], [0.0, 0.0]]), target)
    with pytest.raises(core.ValidationError, match="plan shape"):
        mapping.barycentric_map(np.ones((2, 3)) / 6, target)
