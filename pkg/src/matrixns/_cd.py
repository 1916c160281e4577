"""Numba-compiled cyclic coordinate descent on the Gram formulation.

The kernel works on G = X'X/s and c = X'y/s, maintaining the negative
smooth gradient rho = c - G theta incrementally (one axpy per changed
coordinate). Convergence requires both a small largest coordinate update,
max|delta| < tol * (1 + max|theta|), and a KKT residual <= kkt_tol; the
residual is evaluated from a freshly recomputed rho so incremental drift
cannot fake convergence.

Plain IEEE double arithmetic throughout (no fastmath), so results are
identical to the equivalent pure-Python loops.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def soft_threshold_scalar(z, lam):
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


@njit(cache=True)
def kkt_from_rho(rho, theta, lam):
    """Max subgradient violation given rho = c - G theta."""
    worst = 0.0
    for j in range(theta.shape[0]):
        if theta[j] > 0.0:
            v = abs(rho[j] - lam)
        elif theta[j] < 0.0:
            v = abs(rho[j] + lam)
        else:
            v = abs(rho[j]) - lam
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def cd_gram(G, c, lam, theta, tol, max_sweeps, kkt_tol, objectives, record_obj):
    """Run sweeps in place on theta.

    Returns (sweeps, max_kkt_violation, status) where status is
    0 = converged, 1 = sweep budget exhausted, 2 = non-finite value hit.
    When record_obj is true, objectives[k] receives the penalized objective
    (without the constant y'y/(2s) term) after sweep k.
    """
    d = G.shape[0]
    rho = c - G @ theta
    sweeps = 0
    status = 1
    for _ in range(max_sweeps):
        sweeps += 1
        maxdelta = 0.0
        maxtheta = 0.0
        for j in range(d):
            gjj = G[j, j]
            if gjj <= 0.0:
                # zero (or numerically dead) column: coefficient stays 0
                continue
            z = rho[j] + gjj * theta[j]
            tnew = soft_threshold_scalar(z, lam) / gjj
            if not np.isfinite(tnew):
                return sweeps, np.inf, 2
            delta = tnew - theta[j]
            if delta != 0.0:
                for k in range(d):
                    rho[k] -= delta * G[k, j]
                theta[j] = tnew
                ad = abs(delta)
                if ad > maxdelta:
                    maxdelta = ad
            at = abs(theta[j])
            if at > maxtheta:
                maxtheta = at
        if record_obj:
            quad = 0.0
            lin = 0.0
            l1 = 0.0
            gt = G @ theta
            for j in range(d):
                quad += theta[j] * gt[j]
                lin += c[j] * theta[j]
                l1 += abs(theta[j])
            objectives[sweeps - 1] = 0.5 * quad - lin + lam * l1
        if maxdelta < tol * (1.0 + maxtheta):
            rho = c - G @ theta  # fresh gradient, no incremental drift
            kkt = kkt_from_rho(rho, theta, lam)
            if kkt <= kkt_tol:
                return sweeps, kkt, 0
            if maxdelta == 0.0:
                # exact fixed point that still violates KKT (dead column);
                # more sweeps cannot move it
                return sweeps, kkt, 1
    rho = c - G @ theta
    kkt = kkt_from_rho(rho, theta, lam)
    if not np.isfinite(kkt):
        status = 2
    return sweeps, kkt, status
