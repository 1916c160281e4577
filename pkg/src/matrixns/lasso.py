"""L1-penalized least squares by cyclic coordinate descent.

The objective is

    RSS / (2 * objective_scale) + lambda * ||theta||_1

with ``objective_scale`` an explicit field of the problem. For nodewise
regressions on stacked matrix data the natural scale is the number of
stacked rows N = n*q: the smooth gradient is then X'r/N, matching the Gram
matrix X'X/N with unit diagonal on standardized data. A scale of n instead
reproduces the RSS/(2n) normalization some formulations use; the two differ
only by a relabeling of lambda (see the scaling contract below).

Scaling contract: the minimizer depends on (objective_scale, lambda)
only through their product, so multiplying the scale by c while dividing
lambda by c leaves it unchanged. That is the relabeling connecting the
default scale N to the literal per-observation scale n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._cd import cd_gram, kkt_from_rho
from .errors import NonFiniteEncountered

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000
#: convergence demands a KKT residual no larger than this multiple of tol
KKT_TOL_FACTOR = 10.0


@dataclass(frozen=True)
class RegressionProblem:
    """Design (N x d), response (length N), and the RSS divisor."""

    design: np.ndarray
    response: np.ndarray
    objective_scale: float | None = None

    def __post_init__(self):
        x = np.asarray(self.design, dtype=np.float64)
        y = np.asarray(self.response, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError(f"design must be 2-D, got ndim={x.ndim}")
        if y.shape != (x.shape[0],):
            raise ValueError(f"response shape {y.shape} does not match design {x.shape}")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("design needs at least one row and one column")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise NonFiniteEncountered("problem data contains NaN or infinity")
        scale = float(x.shape[0]) if self.objective_scale is None else float(self.objective_scale)
        if scale <= 0:
            raise ValueError(f"objective_scale must be positive, got {scale}")
        object.__setattr__(self, "design", x)
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "objective_scale", scale)

    @property
    def n_rows(self) -> int:
        return self.design.shape[0]

    @property
    def n_coefficients(self) -> int:
        return self.design.shape[1]

    def gram(self) -> tuple[np.ndarray, np.ndarray, float]:
        """(X'X/s, X'y/s, y'y/(2s)): everything the CD kernel needs."""
        s = self.objective_scale
        g = self.design.T @ self.design / s
        c = self.design.T @ self.response / s
        const = float(self.response @ self.response) / (2.0 * s)
        return g, c, const


@dataclass(frozen=True)
class LassoSolution:
    coefficients: np.ndarray
    lam: float
    iterations: int
    max_kkt_violation: float
    converged: bool
    objective: float

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=np.float64)
        )

    @property
    def support(self) -> frozenset:
        return frozenset(np.flatnonzero(self.coefficients).tolist())


@dataclass(frozen=True)
class LassoPath:
    lambdas: np.ndarray
    solutions: list

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=np.float64)
        if lams.size != len(self.solutions):
            raise ValueError("lambdas and solutions must have equal length")
        if lams.size > 1 and not np.all(np.diff(lams) < 0):
            raise ValueError("lambdas must be strictly descending")
        object.__setattr__(self, "lambdas", lams)


def soft_threshold(z: float, lam: float) -> float:
    """sign(z) * max(|z| - lam, 0)."""
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


def lambda_max(prob: RegressionProblem) -> float:
    """Smallest penalty at which the all-zero vector is optimal."""
    return float(np.abs(prob.design.T @ prob.response / prob.objective_scale).max())


def log2_grid(log2_lo: float, log2_hi: float, log2_step: float) -> np.ndarray:
    """Descending grid 2^hi, ..., 2^lo with the given exponent step.

    Endpoints are included; the point count is computed by rounding
    (hi - lo)/step so float accumulation cannot drop the last point.
    The default benchmark grid is log2_grid(-10, 2, 0.25), 49 points.
    """
    if log2_step <= 0:
        raise ValueError("log2_step must be positive")
    if log2_hi < log2_lo:
        raise ValueError("log2_hi must be >= log2_lo")
    count = int(round((log2_hi - log2_lo) / log2_step)) + 1
    exponents = log2_hi - log2_step * np.arange(count)
    return np.power(2.0, exponents)


def solve(
    prob: RegressionProblem,
    lam: float,
    init: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    track_objective: bool = False,
):
    """Minimize RSS/(2s) + lam * ||theta||_1 by cyclic coordinate descent.

    Parameters
    ----------
    prob : RegressionProblem
    lam : float
        Penalty level, >= 0.
    init : ndarray, optional
        Warm start; zeros when omitted.
    tol : float
        Convergence gate: largest coordinate update below
        tol * (1 + ||theta||_inf) and KKT residual below 10 * tol.
    max_iter : int
        Sweep budget. On exhaustion the best iterate is returned with
        ``converged=False`` (no exception).
    track_objective : bool
        When true, also return the per-sweep objective values (used by the
        monotonicity tests); the return becomes (solution, objectives).

    Raises
    ------
    NonFiniteEncountered
        If the iteration produces NaN or infinity.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g, c, const = prob.gram()
    return _solve_gram(g, c, const, prob.n_coefficients, lam, init, tol, max_iter,
                       track_objective)


def _solve_gram(g, c, const, d, lam, init, tol, max_iter, track_objective=False):
    """Shared driver for solve() and the estimator paths (same kernel)."""
    if init is None:
        theta = np.zeros(d)
    else:
        theta = np.array(init, dtype=np.float64, copy=True)
        if theta.shape != (d,):
            raise ValueError(f"init shape {theta.shape}, expected ({d},)")
    objectives = np.empty(max_iter if track_objective else 1)
    sweeps, kkt, status = cd_gram(
        g, c, float(lam), theta, float(tol), int(max_iter),
        KKT_TOL_FACTOR * float(tol), objectives, track_objective,
    )
    if status == 2:
        raise NonFiniteEncountered(
            f"coordinate descent produced non-finite values at lambda={lam}"
        )
    obj = _objective_from_gram(g, c, const, theta, lam)
    sol = LassoSolution(
        coefficients=theta,
        lam=float(lam),
        iterations=int(sweeps),
        max_kkt_violation=float(kkt),
        converged=status == 0,
        objective=float(obj),
    )
    if track_objective:
        return sol, objectives[:sweeps] + const
    return sol


def _objective_from_gram(g, c, const, theta, lam) -> float:
    return 0.5 * theta @ g @ theta - c @ theta + const + lam * np.abs(theta).sum()


def objective(prob: RegressionProblem, lam: float, theta) -> float:
    """Full objective value RSS/(2s) + lam * ||theta||_1 at theta."""
    r = prob.response - prob.design @ theta
    return float(r @ r / (2.0 * prob.objective_scale) + lam * np.abs(theta).sum())


def kkt_check(prob: RegressionProblem, lam: float, theta) -> float:
    """Max subgradient violation of theta for the problem at lam.

    For theta_j != 0 the stationarity condition is x_j'r/s = lam * sign,
    for theta_j = 0 it is |x_j'r/s| <= lam; the returned value is the
    largest amount by which either fails.
    """
    theta = np.asarray(theta, dtype=np.float64)
    r = prob.response - prob.design @ theta
    rho = prob.design.T @ r / prob.objective_scale
    return float(kkt_from_rho(rho, theta, float(lam)))


def solve_path(
    prob: RegressionProblem,
    lambdas,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LassoPath:
    """Warm-started solves along a descending lambda grid.

    The grid is sorted descending internally. Solution k starts from
    solution k-1's coefficients. A solve that raises a numerical error is
    recorded as a zero-coefficient placeholder with ``converged=False`` and
    the path continues from a cold start.
    """
    g, c, const = prob.gram()
    return path_from_gram(g, c, const, prob.n_coefficients, lambdas, tol, max_iter)


def path_from_gram(g, c, const, d, lambdas, tol=DEFAULT_TOL,
                   max_iter=DEFAULT_MAX_ITER) -> LassoPath:
    """solve_path on a precomputed Gram block (shared by the estimators,
    which slice one dataset-level Gram matrix into every nodewise problem)."""
    lams = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
    if lams.size == 0:
        raise ValueError("empty lambda grid")
    if np.unique(lams).size != lams.size:
        raise ValueError("lambda grid contains duplicates")
    solutions = []
    warm = None
    for lam in lams:
        try:
            sol = _solve_gram(g, c, const, d, lam, warm, tol, max_iter)
        except NonFiniteEncountered:
            sol = LassoSolution(
                coefficients=np.zeros(d), lam=float(lam), iterations=0,
                max_kkt_violation=np.inf, converged=False,
                objective=float(const),
            )
            warm = None
            solutions.append(sol)
            continue
        warm = sol.coefficients
        solutions.append(sol)
    return LassoPath(lambdas=lams, solutions=solutions)
