"""Graph estimators: nodewise neighborhood selection and the GEMINI baseline.

The row-graph estimator stacks every observation's columns into one tall
design (nq rows, p columns), lassos each variable on the other p-1, and
turns the supports into an undirected edge set with the AND rule (both
directions must select the edge) or the OR rule (either direction). The
column graph is the same procedure on transposed observations.

GEMINI instead forms the row (or column) Gram matrix, rescales it to a
correlation matrix, and runs a graphical lasso; edges are the nonzero
off-diagonal entries of the estimated precision matrix.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import lasso, seeding
from .errors import (DimensionMismatch, InsufficientSamples, NonConvergence,
                     SingularInput)
from .linalg import spd_inverse, symmetrize
from .matnorm import (GramMatrix, MatrixDataset, gram_col, gram_row,
                      stack_columns, to_correlation, transpose_dataset)
from .structures import EdgeSet, edge_set

#: |theta_ij| above this counts as an edge in a graphical-lasso estimate
GLASSO_EDGE_TOL = 1e-8
#: variance below this marks a degenerate response column
RESPONSE_VAR_FLOOR = 1e-14


class CombineRule(str, enum.Enum):
    AND = "and"
    OR = "or"


def _as_rule(rule) -> CombineRule:
    if isinstance(rule, CombineRule):
        return rule
    return CombineRule(str(rule).lower())


@dataclass(frozen=True)
class NodeRegressionResult:
    """One node's lasso fit, reported in full-graph coordinates.

    ``coefficients`` has length p with a structural zero at ``node``;
    ``support`` is the exact nonzero pattern (excluding the node itself).
    """

    node: int
    coefficients: np.ndarray
    support: frozenset
    lambda_used: float
    converged: bool
    warning: str | None = None


# ---------------------------------------------------------------------------
# nodewise machinery
# ---------------------------------------------------------------------------

def _stacked(d: MatrixDataset, axis: str) -> np.ndarray:
    if axis == "row":
        return stack_columns(d)
    if axis == "col":
        return stack_columns(transpose_dataset(d))
    raise ValueError(f"axis must be `row` or `col`, got `{axis}`")


def _warn_if_raw(d: MatrixDataset):
    if not d.standardized:
        warnings.warn(
            "matrixns expects standardized data; fitting the raw values",
            UserWarning, stacklevel=3,
        )


def nodewise_paths(
    d: MatrixDataset,
    axis: str,
    lambdas,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
    literal_scale: bool = False,
):
    """Warm-started lasso paths for every node of the chosen axis.

    Returns (paths, node_warnings): one LassoPath per node (coefficients in
    reduced, node-deleted coordinates) and a dict of node index to warning
    text for nodes that were skipped or failed to converge. The objective
    scale is the stacked row count (nq for the row axis); with
    ``literal_scale=True`` it is n instead, which rescales every lambda by
    a factor q relative to the default (same minimizers, relabeled grid).

    One Gram matrix serves all nodes: node a's subproblem uses the Gram
    with row/column a deleted, and column a as its linear term.
    """
    x = _stacked(d, axis)
    _warn_if_raw(d)
    n_rows, nodes = x.shape
    scale = float(d.n) if literal_scale else float(n_rows)
    gram_full = x.T @ x / scale
    variances = x.var(axis=0)
    degenerate = np.flatnonzero(variances < RESPONSE_VAR_FLOOR)
    if degenerate.size:
        # a degenerate variable leaves every design, not just its own
        # regression, so it ends up isolated under either combine rule
        gram_full[degenerate, :] = 0.0
        gram_full[:, degenerate] = 0.0
        gram_full[degenerate, degenerate] = 1.0
    paths = []
    node_warnings: dict[int, str] = {}
    lams = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
    for a in range(nodes):
        if variances[a] < RESPONSE_VAR_FLOOR:
            # degenerate response: this node becomes an isolated vertex
            zero = [
                lasso.LassoSolution(
                    coefficients=np.zeros(nodes - 1), lam=float(lam), iterations=0,
                    max_kkt_violation=0.0, converged=True,
                    objective=float(gram_full[a, a] / 2.0),
                )
                for lam in lams
            ]
            paths.append(lasso.LassoPath(lambdas=lams, solutions=zero))
            node_warnings[a] = f"node {a}: zero-variance response, skipped"
            continue
        keep = np.arange(nodes) != a
        g = gram_full[np.ix_(keep, keep)]
        c = gram_full[keep, a]
        const = gram_full[a, a] / 2.0
        path = lasso.path_from_gram(g, c, const, nodes - 1, lams, tol, max_iter)
        bad = [sol.lam for sol in path.solutions if not sol.converged]
        if bad:
            node_warnings[a] = (
                f"node {a}: no convergence at lambda " +
                ", ".join(f"{b:.6g}" for b in bad)
            )
        paths.append(path)
    return paths, node_warnings


def _expand(node: int, reduced: np.ndarray) -> np.ndarray:
    """Reinsert the structural zero at the node's own position."""
    full = np.zeros(reduced.size + 1)
    full[:node] = reduced[:node]
    full[node + 1:] = reduced[node:]
    return full


def _support_full(node: int, reduced: np.ndarray) -> frozenset:
    idx = np.flatnonzero(reduced)
    return frozenset(int(j) if j < node else int(j) + 1 for j in idx)


def edges_from_supports(supports, rule=CombineRule.AND) -> EdgeSet:
    """Combine per-node neighborhoods into an undirected edge set."""
    rule = _as_rule(rule)
    p = len(supports)
    pairs = set()
    for a in range(p):
        for b in supports[a]:
            if b == a:
                raise ValueError(f"support of node {a} contains itself")
            lo, hi = min(a, b), max(a, b)
            if rule is CombineRule.OR:
                pairs.add((lo, hi))
            elif a in supports[b]:
                pairs.add((lo, hi))
    return EdgeSet(dimension=p, edges=frozenset(pairs))


def matrixns_path(
    d: MatrixDataset,
    axis: str,
    lambdas,
    rule=CombineRule.AND,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
    literal_scale: bool = False,
) -> list:
    """Edge sets along a lambda grid: list of (lambda, EdgeSet), descending."""
    rule = _as_rule(rule)
    paths, _ = nodewise_paths(d, axis, lambdas, tol, max_iter, literal_scale)
    if not paths:
        raise ValueError("dataset has no variables on the requested axis")
    lams = paths[0].lambdas
    out = []
    for k, lam in enumerate(lams):
        supports = [
            _support_full(a, paths[a].solutions[k].coefficients)
            for a in range(len(paths))
        ]
        out.append((float(lam), edges_from_supports(supports, rule)))
    return out


def matrixns_fit_nodes(
    d: MatrixDataset,
    axis: str,
    lam: float,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
    literal_scale: bool = False,
) -> list:
    """Per-node regression results at a single penalty level."""
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    paths, node_warnings = nodewise_paths(
        d, axis, [lam], tol, max_iter, literal_scale
    )
    results = []
    for a, path in enumerate(paths):
        sol = path.solutions[0]
        results.append(NodeRegressionResult(
            node=a,
            coefficients=_expand(a, sol.coefficients),
            support=_support_full(a, sol.coefficients),
            lambda_used=float(lam),
            converged=sol.converged,
            warning=node_warnings.get(a),
        ))
    return results


def matrixns_fit(
    d: MatrixDataset,
    axis: str,
    lam: float,
    rule=CombineRule.AND,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
    literal_scale: bool = False,
) -> EdgeSet:
    """Estimated edge set at one penalty level under the given rule."""
    nodes = matrixns_fit_nodes(d, axis, lam, tol, max_iter, literal_scale)
    return edges_from_supports([r.support for r in nodes], rule)


def matrixns_fit_individual(
    d: MatrixDataset,
    axis: str,
    node_lambdas,
    rule=CombineRule.AND,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
    literal_scale: bool = False,
) -> EdgeSet:
    """Edge set with a separate penalty per node (individually tuned).

    ``node_lambdas`` holds one positive lambda per node of the chosen
    axis; node a's support is read at node_lambdas[a]. All nodes share
    one warm-started path over the distinct values, so this costs about
    as much as a single path fit.
    """
    rule = _as_rule(rule)
    lams = np.asarray(node_lambdas, dtype=np.float64)
    if np.any(lams <= 0):
        raise ValueError("every per-node lambda must be > 0")
    grid = np.unique(lams)[::-1]
    paths, _ = nodewise_paths(d, axis, grid, tol, max_iter, literal_scale)
    if len(paths) != lams.size:
        raise DimensionMismatch(
            f"{lams.size} lambdas for {len(paths)} nodes on axis `{axis}`"
        )
    supports = []
    for a, path in enumerate(paths):
        k = int(np.flatnonzero(path.lambdas == lams[a])[0])
        supports.append(_support_full(a, path.solutions[k].coefficients))
    return edges_from_supports(supports, rule)


def population_coefficients(u, a: int) -> np.ndarray:
    """The length p-1 population regression vector of node a.

    Computed from the precision matrix O = u^{-1} as -O_{(a),a} / O_{aa};
    its support is exactly the neighborhood of a in the true graph, which
    is what makes nodewise regression recover edges.
    """
    omega = spd_inverse(u)
    p = omega.shape[0]
    if not 0 <= a < p:
        raise IndexError(f"node {a} outside [0, {p})")
    keep = np.arange(p) != a
    return -omega[keep, a] / omega[a, a]


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------

def cv_tune(
    d: MatrixDataset,
    axis: str,
    folds: int,
    lambdas,
    mode: str = "global",
    rng=0,
    tol: float = lasso.DEFAULT_TOL,
    max_iter: int = lasso.DEFAULT_MAX_ITER,
):
    """Pick lambda by K-fold cross-validation over whole observations.

    Folds split the n observations (never stacked rows, which are
    dependent within an observation); the held-out error of one
    observation is its squared prediction error summed over stacked
    columns. ``mode="global"`` returns the single lambda minimizing the
    error summed over nodes; ``mode="individual"`` returns one lambda per
    node. Ties resolve to the largest lambda. Data are used exactly as
    given (preprocess before calling).
    """
    if mode not in ("global", "individual"):
        raise ValueError(f"mode must be `global` or `individual`, got `{mode}`")
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    if d.n < folds:
        raise InsufficientSamples(f"{d.n} observations cannot fill {folds} folds")
    lams = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
    gen = seeding.as_generator(rng)
    perm = gen.permutation(d.n)
    assignments = np.array_split(perm, folds)
    x_all = _stacked(d, axis)
    rows_per_obs = x_all.shape[0] // d.n
    nodes = x_all.shape[1]
    cv_err = np.zeros((nodes, lams.size))
    for held in assignments:
        held_mask = np.zeros(d.n, dtype=bool)
        held_mask[held] = True
        row_mask = np.repeat(held_mask, rows_per_obs)
        x_tr, x_te = x_all[~row_mask], x_all[row_mask]
        scale = float(x_tr.shape[0])
        gram_full = x_tr.T @ x_tr / scale
        for a in range(nodes):
            keep = np.arange(nodes) != a
            g = gram_full[np.ix_(keep, keep)]
            c = gram_full[keep, a]
            path = lasso.path_from_gram(
                g, c, gram_full[a, a] / 2.0, nodes - 1, lams, tol, max_iter
            )
            thetas = np.column_stack([s.coefficients for s in path.solutions])
            preds = x_te[:, keep] @ thetas
            resid = x_te[:, a][:, None] - preds
            cv_err[a] += (resid ** 2).sum(axis=0)
    if mode == "global":
        return float(lams[int(np.argmin(cv_err.sum(axis=0)))])
    return [float(lams[int(np.argmin(cv_err[a]))]) for a in range(nodes)]


# ---------------------------------------------------------------------------
# GEMINI baseline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlassoSolution:
    theta: np.ndarray
    lam: float
    kkt_residual: float
    iterations: int
    #: (W, B) internal blocks, reusable as `warm` at a nearby lambda
    warm_state: tuple | None = field(default=None, repr=False, compare=False)


def _glasso_kkt(s: np.ndarray, theta: np.ndarray, lam: float) -> float:
    """Stationarity residual of the penalized log-det objective at theta."""
    w = np.linalg.inv(theta)
    grad = s - w
    p = s.shape[0]
    off = ~np.eye(p, dtype=bool)
    nz = off & (theta != 0.0)
    z = off & (theta == 0.0)
    worst = np.abs(np.diag(grad)).max()
    if nz.any():
        worst = max(worst, np.abs(grad[nz] + lam * np.sign(theta[nz])).max())
    if z.any():
        worst = max(worst, max(0.0, np.abs(grad[z]).max() - lam))
    return float(worst)


def _theta_from_blocks(w: np.ndarray, b: np.ndarray) -> np.ndarray:
    p = w.shape[0]
    theta = np.empty((p, p))
    for j in range(p):
        keep = np.arange(p) != j
        beta = b[:, j]
        denom = w[j, j] - w[keep, j] @ beta
        if denom <= 0:
            raise NonConvergence("graphical lasso lost positive definiteness")
        theta[j, j] = 1.0 / denom
        theta[keep, j] = -beta * theta[j, j]
    return (theta + theta.T) / 2.0


def graphical_lasso(
    s,
    lam: float,
    kkt_tol: float = 1e-6,
    max_sweeps: int = 500,
    warm=None,
) -> GlassoSolution:
    """L1-penalized precision estimation (off-diagonal penalty only).

    Minimizes -log det(Theta) + tr(S Theta) + lam * sum_{i != j} |Theta_ij|
    over SPD matrices by block coordinate descent over columns, each column
    a lasso subproblem on the current working covariance. Iterates until
    the KKT residual (computed from a fresh inverse of Theta, not the
    working covariance) drops below ``kkt_tol``.

    ``s`` is a GramMatrix or ndarray; intended use is on correlation
    matrices (any symmetric matrix with positive diagonal is accepted).
    ``warm`` takes the ``warm_state`` of a solution at a nearby lambda;
    :func:`gemini_path` wires this along a grid automatically.

    Raises
    ------
    SingularInput
        At lam = 0 with a singular S (the unpenalized MLE needs S
        invertible).
    NonConvergence
        If the sweep budget runs out before the KKT residual is met.
    """
    mat = s.matrix if isinstance(s, GramMatrix) else s
    mat = symmetrize(np.asarray(mat, dtype=np.float64))
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if np.any(np.diag(mat) <= 0):
        raise ValueError("S needs a strictly positive diagonal")
    p = mat.shape[0]
    if lam == 0.0:
        try:
            theta = spd_inverse(mat)
        except Exception as exc:
            raise SingularInput("lambda = 0 requires an invertible S") from exc
        return GlassoSolution(theta=theta, lam=0.0,
                              kkt_residual=_glasso_kkt(mat, theta, 0.0),
                              iterations=0)
    if p == 1:
        theta = np.array([[1.0 / mat[0, 0]]])
        return GlassoSolution(theta=theta, lam=float(lam), kkt_residual=0.0,
                              iterations=0)
    if warm is None:
        w = mat.copy()
        b = np.zeros((p - 1, p))
    else:
        w = warm[0].copy()
        b = warm[1].copy()
        np.fill_diagonal(w, np.diag(mat))
    theta = None
    kkt = np.inf
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        for j in range(p):
            keep = np.arange(p) != j
            w11 = w[np.ix_(keep, keep)]
            s12 = mat[keep, j]
            beta = b[:, j]
            sol = lasso._solve_gram(
                w11, s12, 0.0, p - 1, lam, beta, 1e-11, 2000
            )
            b[:, j] = sol.coefficients
            w12 = w11 @ sol.coefficients
            w[keep, j] = w12
            w[j, keep] = w12
        theta = _theta_from_blocks(w, b)
        kkt = _glasso_kkt(mat, theta, lam)
        if kkt <= kkt_tol:
            break
    else:
        raise NonConvergence(
            f"graphical lasso: KKT residual {kkt:.3e} > {kkt_tol:.1e} "
            f"after {max_sweeps} sweeps at lambda={lam}"
        )
    return GlassoSolution(theta=theta, lam=float(lam), kkt_residual=float(kkt),
                          iterations=sweeps, warm_state=(w, b))


def _gram_for_axis(d: MatrixDataset, axis: str) -> GramMatrix:
    if axis == "row":
        return gram_row(d)
    if axis == "col":
        return gram_col(d)
    raise ValueError(f"axis must be `row` or `col`, got `{axis}`")


def _warn_if_uncentered(d: MatrixDataset):
    if d.n >= 2:
        worst = np.abs(d.data.mean(axis=0)).max()
        if worst > 1e-8:
            warnings.warn(
                f"gemini expects centered data (max position mean {worst:.3g})",
                UserWarning, stacklevel=3,
            )


def gemini_fit(d: MatrixDataset, axis: str, lam: float,
               kkt_tol: float = 1e-6) -> EdgeSet:
    """GEMINI estimate: graphical lasso on the axis correlation matrix."""
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    _warn_if_uncentered(d)
    corr = to_correlation(_gram_for_axis(d, axis))
    sol = graphical_lasso(corr, lam, kkt_tol=kkt_tol)
    return edge_set(sol.theta, GLASSO_EDGE_TOL)


def gemini_path(d: MatrixDataset, axis: str, lambdas,
                kkt_tol: float = 1e-6) -> list:
    """Warm-started GEMINI estimates along a descending lambda grid."""
    _warn_if_uncentered(d)
    corr = to_correlation(_gram_for_axis(d, axis))
    lams = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
    out = []
    warm = None
    for lam in lams:
        sol = graphical_lasso(corr, float(lam), kkt_tol=kkt_tol, warm=warm)
        warm = sol.warm_state
        out.append((float(lam), edge_set(sol.theta, GLASSO_EDGE_TOL)))
    return out
