import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dosepenalty.krylov import gmres


def test_identity_in_one_step():
    b = np.arange(1.0, 6.0)
    r = gmres(lambda v: v, b)
    assert r.converged and r.iterations == 1
    np.testing.assert_allclose(r.x, b)


def test_zero_rhs():
    r = gmres(lambda v: 2 * v, np.zeros(4))
    assert r.converged and r.iterations == 0 and not r.x.any()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31 - 1))
def test_matches_dense_solve_with_weights(n, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    A = np.eye(n) + B @ B.T / n
    w = rng.uniform(0.1, 2.0, n)
    b = rng.standard_normal(n)
    r = gmres(lambda v: A @ v, b, w, tol=1e-12, maxiter=n + 5)
    assert r.converged
    np.testing.assert_allclose(r.x, np.linalg.solve(A, b), rtol=1e-8, atol=1e-10)
    assert all(a >= b_ - 1e-12 * r.residuals[0] for a, b_ in zip(r.residuals, r.residuals[1:]))


def test_cap_returns_best_iterate():
    rng = np.random.default_rng(5)
    A = np.diag(np.linspace(1, 1e3, 60))
    b = rng.standard_normal(60)
    r = gmres(lambda v: A @ v, b, maxiter=5)
    assert not r.converged and r.iterations == 5
    assert np.linalg.norm(b - A @ r.x) == pytest.approx(r.residuals[-1], rel=1e-8)
    assert r.residuals[-1] < r.residuals[0]


def test_breakdown_on_invariant_subspace():
    # b lies in a 2-dimensional invariant subspace: exact solve in 2 steps
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    b = np.array([1.0, 1.0, 0.0, 0.0])
    r = gmres(lambda v: A @ v, b, tol=1e-14)
    assert r.converged and r.iterations <= 2
    np.testing.assert_allclose(r.x, [1.0, 0.5, 0, 0], atol=1e-13)
