"""Matrix-normal sampling, preprocessing, and Gram matrices.

A dataset is n observations of a p x q matrix. Sampling draws
X = L_U Z L_V' with Z i.i.d. standard normal and L_U, L_V the Cholesky
factors of the row and column covariances, so vec(X) (column stacking) has
covariance V kron U.

Standardization uses the population (1/n) convention for the standard
deviation, so a standardized variable position has exactly unit second
moment; that makes the stacked Gram matrix of a standardized dataset have
unit diagonal, which the nodewise lasso relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import seeding
from .errors import ZeroDiagonal, ZeroVariance
from .linalg import cholesky

VAR_FLOOR = 1e-14


@dataclass(frozen=True)
class MatrixDataset:
    """n observations of shape p x q in a single (n, p, q) array."""

    data: np.ndarray
    standardized: bool = False
    axis_note: str = ""

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"expected (n, p, q) data, got ndim={arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def q(self) -> int:
        return self.data.shape[2]

    def observation(self, i: int) -> np.ndarray:
        return self.data[i]


@dataclass(frozen=True)
class GramMatrix:
    """A row or column Gram matrix together with the divisor that built it."""

    matrix: np.ndarray
    normalizer: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.float64))


def sample(n: int, u, v, rng) -> MatrixDataset:
    """Draw n observations from the matrix normal with covariances (u, v).

    Parameters
    ----------
    n : int
        Number of observations, >= 1.
    u, v : ndarray
        Row (p x p) and column (q x q) covariance matrices, SPD.
    rng : int, SeedSequence, or Generator
        Observation i consumes its own child stream (seed spawn key
        extended by i), so a dataset is reproducible from the seed alone
        and independent of how sampling is scheduled.

    Raises
    ------
    NotPositiveDefinite
        If either covariance fails Cholesky factorization.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    lu = cholesky(u)
    lv = cholesky(v)
    p, q = lu.shape[0], lv.shape[0]
    if isinstance(rng, np.random.Generator):
        streams = rng.spawn(n)
    else:
        seq = seeding.as_seed_sequence(rng)
        streams = [np.random.default_rng(seeding.child(seq, i)) for i in range(n)]
    data = np.empty((n, p, q))
    for i, stream in enumerate(streams):
        z = stream.standard_normal((p, q))
        data[i] = lu @ z @ lv.T
    return MatrixDataset(data=data, standardized=False)


def _moments(d: MatrixDataset) -> tuple[np.ndarray, np.ndarray]:
    mean = d.data.mean(axis=0)
    var = d.data.var(axis=0)  # population convention, ddof=0
    return mean, var


def standardize(d: MatrixDataset) -> MatrixDataset:
    """Center and scale every variable position across the n samples.

    Uses the 1/n standard deviation so each position ends with unit second
    moment exactly. Raises :class:`ZeroVariance` when any position's
    variance falls below 1e-14; the caller decides whether to drop the
    variable or abort.
    """
    if d.n < 2:
        raise ValueError("standardization needs at least 2 observations")
    mean, var = _moments(d)
    bad = np.argwhere(var < VAR_FLOOR)
    if bad.size:
        a, j = bad[0]
        raise ZeroVariance(
            f"variable position (row {a}, col {j}) has variance {var[a, j]:.2e}"
        )
    out = (d.data - mean) / np.sqrt(var)
    return MatrixDataset(data=out, standardized=True, axis_note=d.axis_note)


def center(d: MatrixDataset) -> MatrixDataset:
    """Remove the per-position mean; no scaling."""
    if d.n < 2:
        raise ValueError("centering needs at least 2 observations")
    mean, _ = _moments(d)
    return MatrixDataset(data=d.data - mean, standardized=False, axis_note=d.axis_note)


def transpose_dataset(d: MatrixDataset) -> MatrixDataset:
    """Transpose every observation, swapping the roles of rows and columns."""
    return MatrixDataset(
        data=np.transpose(d.data, (0, 2, 1)),
        standardized=d.standardized,
        axis_note=d.axis_note,
    )


def gram_row(d: MatrixDataset) -> GramMatrix:
    """(sum_i X_i X_i') / (n q), the p x p row Gram matrix."""
    scale = float(d.n * d.q)
    acc = np.einsum("ipq,irq->pr", d.data, d.data)
    return GramMatrix(matrix=(acc + acc.T) / (2.0 * scale), normalizer=scale)


def gram_col(d: MatrixDataset) -> GramMatrix:
    """(sum_i X_i' X_i) / (n p), the q x q column Gram matrix."""
    scale = float(d.n * d.p)
    acc = np.einsum("ipq,ipr->qr", d.data, d.data)
    return GramMatrix(matrix=(acc + acc.T) / (2.0 * scale), normalizer=scale)


def to_correlation(g: GramMatrix) -> GramMatrix:
    """Rescale a Gram matrix to unit diagonal: D^{-1/2} G D^{-1/2}."""
    diag = np.diag(g.matrix).copy()
    if np.any(diag <= 1e-14):
        j = int(np.argmin(diag))
        raise ZeroDiagonal(f"diagonal entry {j} is {diag[j]:.2e}")
    dinv = 1.0 / np.sqrt(diag)
    corr = g.matrix * np.outer(dinv, dinv)
    np.fill_diagonal(corr, 1.0)
    return GramMatrix(matrix=corr, normalizer=g.normalizer)


def stack_columns(d: MatrixDataset) -> np.ndarray:
    """The nq x p design matrix whose rows are the observations' columns.

    Row (i*q + j) is column j of observation i. Column a therefore holds
    every sample of row-variable a, which is the stacking the row-graph
    nodewise regressions run on.
    """
    return np.transpose(d.data, (0, 2, 1)).reshape(d.n * d.q, d.p)
