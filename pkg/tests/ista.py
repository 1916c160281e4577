"""Proximal-gradient lasso solver used as an independent test oracle.

Minimizes RSS / (2 * scale) + lam * ||theta||_1 by ISTA with a fixed
step of 1 / L, L the largest eigenvalue of the Gram matrix. Nothing
here touches the package's coordinate-descent code path.
"""

import numpy as np


def ista_lasso(x, y, lam, scale=None, max_iter=100_000, tol=1e-12):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = float(x.shape[0] if scale is None else scale)
    gram = x.T @ x / s
    rho = x.T @ y / s
    step = 1.0 / np.linalg.eigvalsh(gram)[-1]
    theta = np.zeros(x.shape[1])
    for _ in range(max_iter):
        z = theta - step * (gram @ theta - rho)
        new = np.sign(z) * np.maximum(np.abs(z) - step * lam, 0.0)
        if np.max(np.abs(new - theta)) < tol:
            return new
        theta = new
    return theta


def ista_objective(x, y, lam, theta, scale=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = float(x.shape[0] if scale is None else scale)
    r = y - x @ theta
    return float(r @ r) / (2.0 * s) + lam * float(np.sum(np.abs(theta)))
