"""Dense linear algebra helpers: factorizations, kron, vec."""

import numpy as np
import pytest

from matrixns import linalg
from matrixns.errors import NotPositiveDefinite


def test_cholesky_identity():
    np.testing.assert_array_equal(linalg.cholesky(np.eye(3)), np.eye(3))


def test_cholesky_worked_2x2():
    l = linalg.cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
    expected = np.array([[2.0, 0.0], [1.0, np.sqrt(2.0)]])
    np.testing.assert_allclose(l, expected, rtol=0, atol=1e-15)


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        linalg.cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_cholesky_reconstruction():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((6, 6))
    m = a @ a.T + np.eye(6)
    l = linalg.cholesky(m)
    assert np.abs(l @ l.T - m).max() < 1e-10
    # lower triangular with positive diagonal
    assert np.allclose(l, np.tril(l))
    assert (np.diag(l) > 0).all()


def test_sym_eigen_diagonal():
    vals, vecs = linalg.sym_eigen(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(vals, [3.0, 1.0])
    # descending order, orthonormal columns
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(2), atol=1e-14)


def test_sym_eigen_2x2():
    vals, _ = linalg.sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(vals, [3.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("dim", [2, 10, 60, 100])
def test_sym_eigen_reconstruction(dim):
    rng = np.random.default_rng(dim)
    m = rng.standard_normal((dim, dim))
    m = (m + m.T) / 2.0
    vals, vecs = linalg.sym_eigen(m)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - m).max() < 1e-8
    assert (np.diff(vals) <= 1e-12).all()


def test_kron_identities():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    kp = linalg.kron(a, b)
    np.testing.assert_array_equal(kp[:2, :2], 1.0 * b)
    np.testing.assert_array_equal(kp[:2, 2:], 2.0 * b)
    np.testing.assert_array_equal(kp[2:, :2], 3.0 * b)
    np.testing.assert_array_equal(kp[2:, 2:], 4.0 * b)
    assert linalg.kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)


def test_vec_column_stacking():
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(linalg.vec(x), [1.0, 3.0, 2.0, 4.0])


def test_vec_kron_identity():
    # vec(B X A') = (A kron B) vec(X)
    rng = np.random.default_rng(11)
    a = rng.standard_normal((4, 4))
    b = rng.standard_normal((3, 3))
    x = rng.standard_normal((3, 4))
    lhs = linalg.vec(b @ x @ a.T)
    rhs = linalg.kron(a, b) @ linalg.vec(x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_symmetrize_tolerance():
    m = np.array([[1.0, 0.5 + 1e-12], [0.5, 1.0]])
    out = linalg.symmetrize(m)
    assert out[0, 1] == out[1, 0]
    with pytest.raises(ValueError):
        linalg.symmetrize(np.array([[1.0, 5.0], [0.0, 1.0]]))


def test_check_spd_accepts_and_rejects():
    linalg.check_spd(np.eye(4))
    with pytest.raises(NotPositiveDefinite):
        linalg.check_spd(np.diag([1.0, -1.0]))


def test_spd_inverse_and_solve():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 5))
    m = a @ a.T + np.eye(5)
    inv = linalg.spd_inverse(m)
    assert np.abs(inv @ m - np.eye(5)).max() < 1e-10
    b = rng.standard_normal(5)
    np.testing.assert_allclose(linalg.spd_solve(m, b), np.linalg.solve(m, b),
                               atol=1e-10)


def test_as_matrix_rejects_nonsquare():
    with pytest.raises(ValueError):
        linalg.cholesky(np.ones((2, 3)))
    with pytest.raises(ValueError):
        linalg.cholesky(np.array([[1.0, np.nan], [np.nan, 1.0]]))
