"""Nodewise neighborhood selection, CV tuning, and the correlation
graphical-lasso baseline."""

import numpy as np
import pytest

from matrixns import linalg, lasso
from matrixns.errors import InsufficientSamples, SingularInput
from matrixns.estimators import (
    CombineRule,
    cv_tune,
    edges_from_supports,
    gemini_fit,
    gemini_path,
    graphical_lasso,
    matrixns_fit,
    matrixns_fit_individual,
    matrixns_fit_nodes,
    matrixns_path,
    population_coefficients,
)
from matrixns.matnorm import GramMatrix, MatrixDataset, center, sample, standardize, transpose_dataset
from matrixns.structures import gen_band


def std_sample(n, u, v, seed):
    return standardize(sample(n, u, v, seed))


@pytest.fixture(scope="module")
def small_dataset():
    u = linalg.spd_inverse(gen_band(6, 0.6).omega)
    return std_sample(40, u, np.eye(5), 1234)


# ---------------------------------------------------------------------------
# population identity
# ---------------------------------------------------------------------------

def test_population_tridiagonal():
    omega = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    u = linalg.spd_inverse(omega)
    np.testing.assert_allclose(population_coefficients(u, 1), [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(population_coefficients(u, 0), [0.5, 0.0], atol=1e-12)


def test_population_diagonal_is_zero():
    np.testing.assert_array_equal(population_coefficients(np.diag([1.0, 2.0, 3.0]), 0),
                                  np.zeros(2))


def test_population_support_is_neighborhood():
    m = gen_band(7, 0.5)
    u = linalg.spd_inverse(m.omega)
    e = m.edge_set()
    for a in range(7):
        coef = population_coefficients(u, a)
        others = [b for b in range(7) if b != a]
        support = {others[j] for j in np.flatnonzero(np.abs(coef) > 1e-10)}
        assert support == set(e.neighborhood(a))


def test_population_index_bounds():
    with pytest.raises(IndexError):
        population_coefficients(np.eye(3), 3)


# ---------------------------------------------------------------------------
# nodewise fits
# ---------------------------------------------------------------------------

def test_and_subset_of_or(small_dataset):
    for lam in (0.05, 0.15, 0.4):
        e_and = matrixns_fit(small_dataset, "row", lam, rule="and")
        e_or = matrixns_fit(small_dataset, "row", lam, rule="or")
        assert e_and.edges <= e_or.edges


def test_empty_above_lambda_max(small_dataset):
    assert len(matrixns_fit(small_dataset, "row", 50.0)) == 0


def test_transpose_duality_exact(small_dataset):
    for rule in ("and", "or"):
        direct = matrixns_fit(small_dataset, "col", 0.1, rule=rule)
        dual = matrixns_fit(transpose_dataset(small_dataset), "row", 0.1, rule=rule)
        assert direct.edges == dual.edges
        assert direct.dimension == dual.dimension == 5


def test_permutation_equivariance():
    u = linalg.spd_inverse(gen_band(6, 0.6).omega)
    d = std_sample(30, u, np.eye(5), 55)
    perm = np.array([3, 0, 5, 1, 4, 2])
    permuted = MatrixDataset(data=d.data[:, perm, :], standardized=True)
    base = matrixns_fit(d, "row", 0.12)
    mapped = {tuple(sorted((int(np.where(perm == a)[0][0]),
                            int(np.where(perm == b)[0][0]))))
              for a, b in base.edges}
    assert matrixns_fit(permuted, "row", 0.12).edges == frozenset(mapped)


def test_null_model_mostly_empty():
    # independent entries: AND graph empty in >= 95 of 100 replicates
    hits = 0
    for i in range(100):
        seq = np.random.SeedSequence(7000, spawn_key=(i,))
        d = std_sample(50, np.eye(10), np.eye(10), seq)
        if len(matrixns_fit(d, "row", 0.5)) == 0:
            hits += 1
    assert hits >= 95


def test_fit_nodes_structural_zero(small_dataset):
    for res in matrixns_fit_nodes(small_dataset, "row", 0.1):
        assert res.coefficients[res.node] == 0.0
        assert res.node not in res.support
        nz = set(np.flatnonzero(res.coefficients).tolist())
        assert nz == set(res.support)
        assert res.lambda_used == 0.1
        assert res.converged


def test_zero_variance_node_is_isolated():
    rng = np.random.default_rng(3)
    arr = rng.standard_normal((20, 4, 3))
    arr[:, 2, :] = 1.5  # row variable 2 never varies
    d = MatrixDataset(data=arr, standardized=True)  # bypass the raw-data warning
    results = matrixns_fit_nodes(d, "row", 0.05)
    assert results[2].warning is not None
    assert results[2].support == frozenset()
    # isolated under both rules: no other node may select it either
    for rule in ("and", "or"):
        e = matrixns_fit(d, "row", 0.05, rule=rule)
        assert all(2 not in pair for pair in e.edges)


def test_raw_data_warns():
    d = sample(10, np.eye(3), np.eye(3), 0)
    with pytest.warns(UserWarning):
        matrixns_fit(d, "row", 0.3)


def test_path_matches_single_fits(small_dataset):
    grid = lasso.log2_grid(-6, -1, 1.0)
    path = matrixns_path(small_dataset, "row", grid)
    assert [lam for lam, _ in path] == sorted(grid.tolist(), reverse=True)
    for lam, edges in path:
        assert edges.edges == matrixns_fit(small_dataset, "row", lam).edges


def test_individual_lambdas_match_uniform(small_dataset):
    uniform = matrixns_fit_individual(small_dataset, "row", [0.1] * 6)
    assert uniform.edges == matrixns_fit(small_dataset, "row", 0.1).edges
    with pytest.raises(ValueError):
        matrixns_fit_individual(small_dataset, "row", [0.1, -0.1, 0.1, 0.1, 0.1, 0.1])


def test_individual_wrong_length(small_dataset):
    from matrixns.errors import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        matrixns_fit_individual(small_dataset, "row", [0.1, 0.2])


def test_lambda_validation(small_dataset):
    with pytest.raises(ValueError):
        matrixns_fit(small_dataset, "row", 0.0)
    with pytest.raises(ValueError):
        matrixns_fit(small_dataset, "row", 0.1, rule="xor")
    with pytest.raises(ValueError):
        matrixns_fit(small_dataset, "diag", 0.1)


def test_edges_from_supports_rules():
    sup = [frozenset({1}), frozenset(), frozenset({0, 1})]
    assert edges_from_supports(sup, CombineRule.AND).edges == frozenset()
    assert edges_from_supports(sup, CombineRule.OR).edges == frozenset(
        {(0, 1), (1, 2), (0, 2)})
    with pytest.raises(ValueError):
        edges_from_supports([frozenset({0})])


def test_literal_scale_relabels_grid(small_dataset):
    # objective scale n instead of nq: same sets at lambda times q
    q = small_dataset.q
    a = matrixns_fit(small_dataset, "row", 0.08)
    b = matrixns_fit(small_dataset, "row", 0.08 * q, literal_scale=True)
    assert a.edges == b.edges


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------

def test_cv_global_returns_grid_member(small_dataset):
    grid = lasso.log2_grid(-6, 0, 0.5)
    lam = cv_tune(small_dataset, "row", 5, grid, mode="global", rng=0)
    assert isinstance(lam, float)
    assert lam in grid


def test_cv_individual_returns_per_node(small_dataset):
    grid = lasso.log2_grid(-4, 0, 1.0)
    lams = cv_tune(small_dataset, "row", 4, grid, mode="individual", rng=0)
    assert len(lams) == small_dataset.p
    assert all(l in grid for l in lams)


def test_cv_deterministic(small_dataset):
    grid = lasso.log2_grid(-5, 0, 1.0)
    a = cv_tune(small_dataset, "row", 5, grid, rng=42)
    b = cv_tune(small_dataset, "row", 5, grid, rng=42)
    assert a == b


def test_cv_leave_one_out():
    u = linalg.spd_inverse(gen_band(4, 0.6).omega)
    d = std_sample(8, u, np.eye(3), 9)
    lam = cv_tune(d, "row", 8, lasso.log2_grid(-4, 0, 1.0), rng=1)
    assert lam > 0


def test_cv_errors(small_dataset):
    grid = [0.1, 0.2]
    with pytest.raises(InsufficientSamples):
        cv_tune(small_dataset, "row", 41, grid)
    with pytest.raises(ValueError):
        cv_tune(small_dataset, "row", 1, grid)
    with pytest.raises(ValueError):
        cv_tune(small_dataset, "row", 5, grid, mode="best")


# ---------------------------------------------------------------------------
# graphical lasso
# ---------------------------------------------------------------------------

def test_glasso_identity_fixed_point():
    for lam in (0.0, 0.1, 1.0):
        sol = graphical_lasso(np.eye(4), lam)
        np.testing.assert_allclose(sol.theta, np.eye(4), atol=1e-8)


def test_glasso_full_threshold_gives_diagonal():
    s = np.array([[2.0, 0.3, -0.2], [0.3, 1.0, 0.1], [-0.2, 0.1, 0.5]])
    sol = graphical_lasso(s, 0.31)
    np.testing.assert_allclose(sol.theta, np.diag(1.0 / np.diag(s)), atol=1e-8)


def test_glasso_2x2_sign():
    for r in (0.5, -0.5):
        s = np.array([[1.0, r], [r, 1.0]])
        sol = graphical_lasso(s, 0.2)
        assert sol.theta[0, 1] != 0.0
        assert np.sign(sol.theta[0, 1]) == -np.sign(r)
        assert sol.kkt_residual <= 1e-5


def test_glasso_kkt_and_spd():
    rng = np.random.default_rng(14)
    x = rng.standard_normal((40, 6))
    s = np.corrcoef(x, rowvar=False)
    for lam in (0.05, 0.2):
        sol = graphical_lasso(s, lam)
        assert sol.kkt_residual <= 1e-5
        linalg.cholesky(sol.theta)  # SPD or raises


def test_glasso_zero_lambda_is_inverse():
    rng = np.random.default_rng(15)
    x = rng.standard_normal((50, 4))
    s = x.T @ x / 50.0
    sol = graphical_lasso(s, 0.0)
    np.testing.assert_allclose(sol.theta, linalg.spd_inverse(s), atol=1e-6)


def test_glasso_zero_lambda_singular():
    with pytest.raises(SingularInput):
        graphical_lasso(np.array([[1.0, 1.0], [1.0, 1.0]]), 0.0)


def test_glasso_warm_start_consistent():
    rng = np.random.default_rng(16)
    x = rng.standard_normal((60, 5))
    s = np.corrcoef(x, rowvar=False)
    cold = graphical_lasso(s, 0.1)
    warm = graphical_lasso(s, 0.1, warm=graphical_lasso(s, 0.15).warm_state)
    np.testing.assert_allclose(warm.theta, cold.theta, atol=1e-5)


def test_glasso_input_validation():
    with pytest.raises(ValueError):
        graphical_lasso(np.eye(3), -0.1)
    with pytest.raises(ValueError):
        graphical_lasso(np.diag([1.0, -1.0]), 0.1)
    # GramMatrix wrapper accepted too
    sol = graphical_lasso(GramMatrix(matrix=np.eye(2), normalizer=1.0), 0.1)
    np.testing.assert_allclose(sol.theta, np.eye(2), atol=1e-8)


# ---------------------------------------------------------------------------
# gemini
# ---------------------------------------------------------------------------

def test_gemini_large_lambda_empty():
    d = center(sample(30, np.eye(6), np.eye(6), 31))
    assert len(gemini_fit(d, "row", 2.0)) == 0


def test_gemini_axis_duality():
    d = center(sample(25, np.eye(4), np.eye(6), 33))
    a = gemini_fit(d, "col", 0.2)
    b = gemini_fit(transpose_dataset(d), "row", 0.2)
    assert a.edges == b.edges


def test_gemini_uncentered_warns():
    d = sample(10, np.eye(3), np.eye(3), 35)
    with pytest.warns(UserWarning):
        gemini_fit(d, "row", 0.5)
    with pytest.raises(ValueError):
        gemini_fit(center(d), "row", 0.0)


def test_gemini_path_matches_cold_fits():
    d = center(sample(40, linalg.spd_inverse(gen_band(5, 0.6).omega), np.eye(5), 37))
    grid = lasso.log2_grid(-4, -1, 1.0)
    path = gemini_path(d, "row", grid)
    assert [lam for lam, _ in path] == sorted(grid.tolist(), reverse=True)
    for lam, edges in path:
        assert edges.edges == gemini_fit(d, "row", lam).edges


def test_gemini_recovers_lag1_superset():
    # band row structure: some grid point catches every lag-1 edge in at
    # least 90 of 100 replicates (false positives allowed)
    u = linalg.spd_inverse(gen_band(20, 0.6).omega)
    lag1 = {(a, a + 1) for a in range(19)}
    grid = lasso.log2_grid(-10, 2, 0.25)
    hits = 0
    for i in range(100):
        seq = np.random.SeedSequence(8800, spawn_key=(i,))
        d = center(sample(50, u, np.eye(20), seq))
        for _, edges in gemini_path(d, "row", grid):
            if lag1 <= set(edges.edges):
                hits += 1
                break
    assert hits >= 90
