"""Dense symmetric linear algebra used by every other module.

Matrices are plain float64 ``numpy.ndarray`` values with row-major indexing
semantics. "SPD" throughout means symmetric to within a small relative
tolerance and Cholesky-factorizable; validation happens at the entry points
that need it rather than through a wrapper class.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence, NotPositiveDefinite

SYM_RTOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a float64 2-D array and require finite entries."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def symmetrize(m, rtol: float = SYM_RTOL) -> np.ndarray:
    """Return (M + Mt)/2, rejecting genuinely asymmetric input.

    Asymmetry up to ``rtol`` relative to the largest magnitude entry is
    treated as accumulation noise and absorbed; anything larger raises
    ``ValueError``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).max()
    gap = np.abs(a - a.T).max()
    if gap > rtol * max(scale, 1.0):
        raise ValueError(f"matrix is not symmetric: max asymmetry {gap:.3e}")
    return (a + a.T) / 2.0


def cholesky(m) -> np.ndarray:
    """Lower-triangular L with L Lt = m.

    Raises
    ------
    NotPositiveDefinite
        If the (symmetrized) input is not positive definite.
    """
    a = symmetrize(m)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky failed: {exc}") from exc


def check_spd(m, rtol: float = SYM_RTOL) -> np.ndarray:
    """Validate that m is SPD; return the symmetrized copy."""
    a = symmetrize(m, rtol=rtol)
    cholesky(a)
    return a


def sym_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues in descending order; eigenvectors as orthonormal
        columns aligned with them.
    """
    a = symmetrize(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def kron(a, b) -> np.ndarray:
    """Kronecker product with block (i, j) equal to a[i, j] * b."""
    return np.kron(as_matrix(a), as_matrix(b))


def vec(x) -> np.ndarray:
    """Column-stacking vectorization: columns of x concatenated in order."""
    return np.asarray(x, dtype=np.float64).flatten(order="F")


def spd_inverse(m) -> np.ndarray:
    """Inverse of an SPD matrix via its Cholesky factor."""
    low = cholesky(m)
    ident = np.eye(low.shape[0])
    # two triangular solves: L z = I, Lt x = z
    z = np.linalg.solve(low, ident)
    inv = np.linalg.solve(low.T, z)
    return (inv + inv.T) / 2.0


def spd_solve(m, b) -> np.ndarray:
    """Solve m x = b for SPD m."""
    low = cholesky(m)
    z = np.linalg.solve(low, np.asarray(b, dtype=np.float64))
    return np.linalg.solve(low.T, z)
