import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dialectid.classifiers import ClassifierSpec, ConvergenceError, TrainingError, fit_matrix, smo_solve_binary
from dialectid.classifiers.smo import dual_objective, kkt_violations, primal_objective

from oracles import svm_dual_optimum


def test_analytic_one_dimensional_case():
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    sol = smo_solve_binary(X, y, C=1.0)
    np.testing.assert_allclose(sol.alpha, [0.5, 0.5], atol=1e-12)
    assert sol.bias == pytest.approx(0.0, abs=1e-12)
    xs = np.array([[-3.0], [0.25], [2.0]])
    np.testing.assert_allclose(sol.decision(xs @ X.T, y), xs.ravel(), atol=1e-12)


def test_duplicated_data_keeps_the_boundary():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(-2, 0.5, (6, 2)), rng.normal(2, 0.5, (6, 2))])
    y = np.repeat([-1.0, 1.0], 6)
    one = smo_solve_binary(X, y, C=10.0)
    two = smo_solve_binary(np.vstack([X, X]), np.concatenate([y, y]), C=10.0)
    w1 = X.T @ (one.alpha * y)
    w2 = np.vstack([X, X]).T @ (two.alpha * np.concatenate([y, y]))
    np.testing.assert_allclose(w1, w2, atol=1e-6)
    assert one.bias == pytest.approx(two.bias, abs=1e-6)


def test_needs_both_signs():
    with pytest.raises(TrainingError):
        smo_solve_binary(np.eye(2), np.array([1.0, 1.0]))


def test_iteration_cap_raises_with_gap():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 3))
    y = np.where(rng.random(40) < 0.5, -1.0, 1.0)
    y[:2] = [-1, 1]
    with pytest.raises(ConvergenceError) as err:
        smo_solve_binary(X, y, C=1.0, max_iter=1)
    assert err.value.duality_gap >= 0 and err.value.iterations == 1


@settings(max_examples=150, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)), elements=st.floats(-5, 5, width=32)),
    st.sampled_from([0.1, 1.0, 10.0]),
    st.data(),
)
def test_kkt_equality_and_strong_duality(X, C, data):
    n = X.shape[0]
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n))
    y = np.asarray(signs)
    y[0], y[1] = -1.0, 1.0
    sol = smo_solve_binary(X, y, C=C)
    K = X @ X.T
    assert abs(sol.alpha @ y) <= 1e-9
    assert np.all((sol.alpha >= 0) & (sol.alpha <= C))
    assert kkt_violations(sol.alpha, sol.bias, y, K, C).max() <= 1e-3
    assert primal_objective(sol.alpha, sol.bias, y, K, C) - dual_objective(sol.alpha, y, K) <= 1e-6


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 4), st.integers(1, 3)), elements=st.floats(-3, 3, width=32)), st.data())
def test_matches_exact_optimum_on_tiny_problems(X, data):
    n = X.shape[0]
    y = np.asarray(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n)))
    y[0], y[1] = -1.0, 1.0
    best, _ = svm_dual_optimum(X, y, 1.0)
    sol = smo_solve_binary(X, y, C=1.0)
    assert abs(dual_objective(sol.alpha, y, X @ X.T) - best) <= 1e-6


def test_separable_data_signs_follow_labels():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(-3, 0.5, (10, 3)), rng.normal(3, 0.5, (10, 3))])
    y = np.repeat([-1.0, 1.0], 10)
    sol = smo_solve_binary(X, y, C=100.0)
    assert np.all(np.sign(sol.decision(X @ X.T, y)) == y)


def test_five_classes_vote_in_tenths():
    rng = np.random.default_rng(3)
    y = np.repeat(np.arange(5), 8)
    X = rng.normal(size=(40, 5)) * 0.3
    X[np.arange(40), y] += 3
    m = fit_matrix(ClassifierSpec("smo"), sp.csr_matrix(X), y, list("abcde"))
    assert len(m.payload.machines) == 10
    P = m.predict_proba(sp.csr_matrix(X))
    np.testing.assert_allclose(P * 10, np.round(P * 10), atol=1e-12)
    assert np.mean(P.argmax(axis=1) == y) == 1.0


def test_empty_class_votes_for_the_present_side():
    X = sp.csr_matrix([[0.0], [1.0], [5.0], [6.0]])
    m = fit_matrix(ClassifierSpec("smo"), X, np.array([0, 0, 2, 2]), ["a", "b", "c"])
    P = m.predict_proba(X)
    assert P.argmax(axis=1).tolist() == [0, 0, 2, 2]
    assert np.all(P[:, 1] == 0)


def test_vote_ties_go_to_lowest_class():
    X = sp.csr_matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    m = fit_matrix(ClassifierSpec("smo"), X, np.array([0, 1, 2]), ["a", "b", "c"])
    # the origin lies on every boundary by symmetry, one vote each
    P = m.predict_proba(sp.csr_matrix((1, 3)))
    assert P.argmax() == 0


def test_duplicate_feature_leaves_predictions_unchanged():
    rng = np.random.default_rng(4)
    y = np.repeat(np.arange(3), 10)
    X = rng.poisson(1.0, size=(30, 4)).astype(float)
    X[np.arange(30), y] += 3
    base = fit_matrix(ClassifierSpec("smo"), sp.csr_matrix(X), y, ["a", "b", "c"])
    X2 = np.hstack([X, X[:, [1]]])
    dup = fit_matrix(ClassifierSpec("smo"), sp.csr_matrix(X2), y, ["a", "b", "c"])
    assert np.array_equal(
        base.predict_proba(sp.csr_matrix(X)).argmax(axis=1),
        dup.predict_proba(sp.csr_matrix(X2)).argmax(axis=1),
    )
