"""Checkable hypotheses of the support-recovery guarantee.

Every quantity here is computed from a *known* (or hypothesized) pair of
covariance matrices: the incoherence margin, maximum graph degree,
eigenvalue bounds, the penalty lower-bound rule, the minimum detectable
signal, and the sample-size conditions. Nothing in this module estimates
model constants from data; feed it the ground truth of a simulation or a
posited model.

`concentration_probe` is the one Monte-Carlo piece: it measures how the
spectral deviation of the row-wise Gram matrix on a fixed index subset
actually concentrates, next to the analytic tail bound, and reports the
smallest constant making the bound dominate what was observed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, matnorm, seeding
from .errors import EmptyGraph, InvalidDimension
from .structures import edge_set

#: entries of a numerically inverted covariance below this are noise
NEIGHBOR_ZERO_TOL = 1e-10

#: search interval for the smallest dominating probe constant
PROBE_C_RANGE = (1e-3, 1e3)

PROBE_GRID_POINTS = 41


@dataclass(frozen=True)
class ModelDiagnostics:
    """Model constants entering the recovery guarantee.

    ``alpha`` is the incoherence margin: positive iff the incoherence
    assumption holds. Values <= 0 are representable so a failing model
    can still be reported on; the rule/condition functions then refuse
    to run (they require every input positive).
    """

    alpha: float
    d_max: int
    eig_u: tuple
    eig_v: tuple
    u_max: float
    v_avg: float

    def __post_init__(self):
        lo_u, hi_u = self.eig_u
        lo_v, hi_v = self.eig_v
        if not (0.0 < lo_u <= hi_u and 0.0 < lo_v <= hi_v):
            raise ValueError("eigenvalue bounds must be positive and ordered")
        if self.alpha > 1.0 + 1e-12:
            raise ValueError(f"incoherence margin {self.alpha} exceeds 1")
        if self.d_max < 0:
            raise ValueError("d_max must be >= 0")
        if self.u_max <= 0.0:
            raise ValueError("u_max must be positive")
        slack = 1e-9 * hi_v
        if not (lo_v - slack <= self.v_avg <= hi_v + slack):
            raise ValueError(
                f"v_avg {self.v_avg} outside eigenvalue range [{lo_v}, {hi_v}]"
            )


@dataclass(frozen=True)
class ConcentrationBound:
    """Analytic tail bound for the subset Gram deviation.

    The tail at deviation level t (in units of the spectral norm of the
    row covariance, scaled by ``c_scale``) is

        3 * subset_size * exp(-min((t/a1)^2, t/a2, (t/a3)^(2/3))).
    """

    a1: float
    a2: float
    a3: float
    c_scale: float
    subset_size: int

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0 and self.a3 > 0):
            raise ValueError("bound scales a1, a2, a3 must be positive")
        if self.c_scale <= 0:
            raise ValueError("c_scale must be positive")
        if self.subset_size < 1:
            raise ValueError("subset_size must be >= 1")

    @classmethod
    def from_model(cls, v_norm: float, subset_size: int, n: int, q: int,
                   c_scale: float = 1.0) -> "ConcentrationBound":
        """Scales for n observations with column covariance norm ``v_norm``."""
        v2 = float(v_norm) ** 2
        a1 = math.sqrt((2.0 * subset_size / q + 1.0) * v2 / n)
        a2 = v2 / (n * math.sqrt(q))
        a3 = v2 / (n * q)
        return cls(a1=a1, a2=a2, a3=a3, c_scale=float(c_scale),
                   subset_size=int(subset_size))

    def tail(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        e1 = (t / self.a1) ** 2
        e2 = t / self.a2
        e3 = (t / self.a3) ** (2.0 / 3.0)
        return 3.0 * self.subset_size * np.exp(-np.minimum(e1, np.minimum(e2, e3)))


def incoherence(u, zero_tol: float = NEIGHBOR_ZERO_TOL) -> float:
    """Incoherence margin alpha of a row covariance.

    For each node a with true neighborhood S (read off the inverse of
    ``u``), measures how strongly the non-neighbors load on S:
    the worst row L1 norm of U_{bS} (U_{SS})^{-1} over b outside S and a.
    Returns 1 minus the worst margin over all nodes; an empty S
    contributes 0 (nothing to be coherent with). Scale-invariant in u.
    """
    u = linalg.check_spd(u)
    p = u.shape[0]
    omega = linalg.spd_inverse(u)
    graph = edge_set(omega, zero_tol)
    worst = 0.0
    for a in range(p):
        s = sorted(graph.neighborhood(a))
        if not s:
            continue
        outside = [b for b in range(p) if b != a and b not in graph.neighborhood(a)]
        if not outside:
            continue
        cross = u[np.ix_(s, outside)]
        loadings = linalg.spd_solve(u[np.ix_(s, s)], cross)
        worst = max(worst, float(np.abs(loadings).sum(axis=0).max()))
    return 1.0 - worst


def degree_and_bounds(u, v, zero_tol: float = NEIGHBOR_ZERO_TOL) -> ModelDiagnostics:
    """All model constants of a known covariance pair in one pass."""
    u = linalg.check_spd(u)
    v = linalg.check_spd(v)
    omega_u = linalg.spd_inverse(u)
    d_max = edge_set(omega_u, zero_tol).max_degree()
    eig_u = linalg.sym_eigen(u)[0]
    eig_v = linalg.sym_eigen(v)[0]
    return ModelDiagnostics(
        alpha=incoherence(u, zero_tol),
        d_max=int(d_max),
        eig_u=(float(eig_u[-1]), float(eig_u[0])),
        eig_v=(float(eig_v[-1]), float(eig_v[0])),
        u_max=float(np.diag(u).max()),
        v_avg=float(np.trace(v) / v.shape[0]),
    )


def _check_sizes(n, p, q, beta) -> None:
    if n < 1 or q < 1:
        raise ValueError(f"need n >= 1 and q >= 1, got n={n}, q={q}")
    if p <= 1:
        raise ValueError(f"need p > 1 so log p is positive, got p={p}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")


def _require_positive_margin(diag: ModelDiagnostics, who: str) -> None:
    if diag.alpha <= 0.0:
        raise ValueError(
            f"{who} requires a positive incoherence margin, got {diag.alpha}; "
            "the incoherence assumption fails for this model"
        )


def lambda_rule(diag: ModelDiagnostics, n: int, p, q: int, beta: float,
                c: float = 1.0, empty_fallback: bool = False) -> float:
    """Penalty lower bound achieving support recovery at confidence beta.

        c * sqrt(beta * v_avg * lam_max_V * log(p) / (nq))
          * max(u_max / alpha, sqrt(lam_min_U / d_max))

    An empty graph (d_max = 0) leaves the second branch undefined;
    by default that raises EmptyGraph, while ``empty_fallback=True``
    drops the branch and keeps u_max / alpha alone (what the diagnose
    command does).
    """
    _check_sizes(n, p, q, beta)
    _require_positive_margin(diag, "lambda_rule")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    base = c * math.sqrt(beta * diag.v_avg * diag.eig_v[1] * math.log(p) / (n * q))
    ratio = diag.u_max / diag.alpha
    if diag.d_max == 0:
        if not empty_fallback:
            raise EmptyGraph(
                "lambda rule undefined at d_max = 0; pass empty_fallback=True "
                "to use the incoherence branch alone"
            )
        return base * ratio
    return base * max(ratio, math.sqrt(diag.eig_u[0] / diag.d_max))


def betamin_threshold(lam: float, diag: ModelDiagnostics) -> float:
    """Smallest guaranteed-detectable precision entry at penalty ``lam``.

    3 * lam * sqrt(d_max) / (lam_min_U * v_avg); zero when the graph is
    empty (nothing to detect). Linear in lam.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if diag.d_max == 0:
        return 0.0
    return 3.0 * lam * math.sqrt(diag.d_max) / (diag.eig_u[0] * diag.v_avg)


@dataclass(frozen=True)
class Inequality:
    """One evaluated inequality: ``lhs relation rhs`` with both sides kept."""

    label: str
    lhs: float
    rhs: float
    relation: str

    def __post_init__(self):
        if self.relation not in (">=", ">", "<="):
            raise ValueError(f"unsupported relation `{self.relation}`")

    @property
    def holds(self) -> bool:
        if self.relation == ">=":
            return self.lhs >= self.rhs
        if self.relation == ">":
            return self.lhs > self.rhs
        return self.lhs <= self.rhs

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ConditionReport:
    """Sample-size conditions with both sides of every inequality.

    ``verdict`` is the guarantee's requirement: (a) and (b) together
    with at least one of the two dimension regimes (c1), (c2). The
    simplified regime (n against log p, nq against (log p)^{3/2}, unit
    constants) is evaluated separately: it describes the union of (c1)
    and (c2) only up to unstated constant factors, so the two verdicts
    may disagree. ``probability_floor`` can be vacuous (<= 0) for small
    p or beta near 1; it is reported, never clipped.
    """

    cond_a: Inequality
    cond_b: Inequality
    cond_c1: tuple
    cond_c2: tuple
    simplified: tuple
    probability_floor: float

    @property
    def a_holds(self) -> bool:
        return self.cond_a.holds

    @property
    def b_holds(self) -> bool:
        return self.cond_b.holds

    @property
    def c1_holds(self) -> bool:
        return all(ineq.holds for ineq in self.cond_c1)

    @property
    def c2_holds(self) -> bool:
        return all(ineq.holds for ineq in self.cond_c2)

    @property
    def verdict(self) -> bool:
        return self.a_holds and self.b_holds and (self.c1_holds or self.c2_holds)

    @property
    def simplified_holds(self) -> bool:
        return all(ineq.holds for ineq in self.simplified)

    def as_dict(self) -> dict:
        return {
            "a": self.cond_a.as_dict(),
            "b": self.cond_b.as_dict(),
            "c1": [ineq.as_dict() for ineq in self.cond_c1],
            "c2": [ineq.as_dict() for ineq in self.cond_c2],
            "verdict": self.verdict,
            "simplified": [ineq.as_dict() for ineq in self.simplified],
            "simplified_holds": self.simplified_holds,
            "probability_floor": self.probability_floor,
        }


def check_conditions(diag: ModelDiagnostics, n: int, p, q: int, beta: float,
                     c1: float = 1.0, c2: float = 1.0) -> ConditionReport:
    """Evaluate every sample-size condition at explicit constants.

    The constants c1, c2 are caller-supplied (default 1); no canonical
    values exist for them. Requires a positive incoherence margin.
    """
    _check_sizes(n, p, q, beta)
    _require_positive_margin(diag, "check_conditions")
    if c1 <= 0 or c2 <= 0:
        raise ValueError(f"constants must be positive, got c1={c1}, c2={c2}")
    log_p = math.log(p)
    lam_min_u, lam_max_u = diag.eig_u
    lam_max_v = diag.eig_v[1]
    v_ratio = lam_max_v / diag.v_avg
    u_ratio = lam_max_u / lam_min_u
    width = 2.0 * diag.d_max / q + 1.0

    cond_a = Inequality(
        label="nq / log p vs worst incoherence-vs-variance load",
        lhs=n * q / log_p,
        rhs=c1 * beta * max(
            diag.d_max / diag.alpha ** 2 * (diag.u_max / lam_min_u) * v_ratio,
            v_ratio ** 2,
        ),
        relation=">=",
    )
    cond_b = Inequality(
        label="n (2 d_max / q + 1) vs squared column norm",
        lhs=n * width,
        rhs=lam_max_v ** 2,
        relation=">=",
    )
    dense_rhs = (c2 ** 4 * width ** 3 * u_ratio ** 4
                 * lam_max_v ** 2 / diag.v_avg ** 4)
    cond_c1 = (
        Inequality(
            label="n / log p lower bound",
            lhs=n / log_p,
            rhs=c2 ** 2 * beta * width * u_ratio * v_ratio ** 2,
            relation=">=",
        ),
        Inequality(
            label="n / q^2 upper bound",
            lhs=n / q ** 2,
            rhs=dense_rhs,
            relation="<=",
        ),
    )
    cond_c2 = (
        Inequality(
            label="nq / (log p)^{3/2} lower bound",
            lhs=n * q / log_p ** 1.5,
            rhs=c2 * beta ** 1.5 * u_ratio * lam_max_v ** 2,
            relation=">=",
        ),
        Inequality(
            label="n / q^2 lower bound",
            lhs=n / q ** 2,
            rhs=dense_rhs,
            relation=">",
        ),
    )
    simplified = (
        Inequality(label="n vs log p", lhs=float(n), rhs=log_p, relation=">="),
        Inequality(label="nq vs (log p)^{3/2}", lhs=float(n * q),
                   rhs=log_p ** 1.5, relation=">="),
    )
    floor = 1.0 - max(3.0 * diag.d_max + 6.0, 5.0 * diag.d_max) / p ** (beta - 1.0)
    return ConditionReport(
        cond_a=cond_a,
        cond_b=cond_b,
        cond_c1=cond_c1,
        cond_c2=cond_c2,
        simplified=simplified,
        probability_floor=floor,
    )


@dataclass(frozen=True)
class ProbeResult:
    """Empirical vs analytic tail of the subset Gram deviation.

    ``empirical_tail[i]`` is the fraction of replicates whose deviation
    reached t[i] * c_scale * u_norm; ``bound_value[i]`` is the analytic
    tail at t[i]. ``c_min`` is the smallest scale constant (within the
    searched range) at which the bound dominates the empirical tail on
    the whole grid; infinity when even the top of the range fails.
    """

    t: np.ndarray
    empirical_tail: np.ndarray
    bound_value: np.ndarray
    deviations: np.ndarray
    bound: ConcentrationBound
    u_norm: float
    c_min: float

    def rows(self):
        """(t, empirical, bound) triples, ready for a CSV writer."""
        return list(zip(self.t.tolist(), self.empirical_tail.tolist(),
                        self.bound_value.tolist()))


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(m)).max())


def concentration_probe(u, v, subset_size: int, n: int, replicates: int,
                        rng, c_scale: float = 1.0, t_grid=None) -> ProbeResult:
    """Monte-Carlo tail of ||subset Gram - its mean||_2 vs the bound.

    Samples ``replicates`` independent datasets of n matrix observations
    restricted to the first ``subset_size`` row indices (their joint law
    needs only that submatrix of u), records each dataset's spectral
    deviation from the population Gram, and tabulates the exceedance
    fraction over a t grid next to the analytic tail. Deviations are
    measured in units of c_scale times the spectral norm of the full u.

    The default grid spans slightly past the largest observed scaled
    deviation in 41 steps, so the empirical tail starts at 1 and ends
    at 0.
    """
    u = linalg.check_spd(u)
    v = linalg.check_spd(v)
    p, q = u.shape[0], v.shape[0]
    if not 1 <= subset_size <= p:
        raise InvalidDimension(f"subset_size {subset_size} outside [1, {p}]")
    if replicates < 100:
        raise ValueError(f"need >= 100 replicates for a tail, got {replicates}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if c_scale <= 0:
        raise ValueError(f"c_scale must be positive, got {c_scale}")

    m = int(subset_size)
    u_ss = u[:m, :m]
    gamma = (np.trace(v) / q) * u_ss
    u_norm = float(linalg.sym_eigen(u)[0][0])
    v_norm = float(linalg.sym_eigen(v)[0][0])
    seq = seeding.as_seed_sequence(rng)

    deviations = np.empty(replicates, dtype=np.float64)
    for r in range(replicates):
        d = matnorm.sample(n, u_ss, v, seeding.child(seq, r))
        deviations[r] = _spectral_norm(matnorm.gram_row(d).matrix - gamma)

    scale = c_scale * u_norm
    if t_grid is None:
        top = deviations.max() / scale
        if top <= 0.0:
            top = 1.0
        t = np.linspace(0.0, 1.05 * top, PROBE_GRID_POINTS)
    else:
        t = np.asarray(t_grid, dtype=np.float64)
        if t.ndim != 1 or t.size < 2 or t[0] != 0.0:
            raise ValueError("t_grid must be 1-D, start at 0, and have >= 2 points")

    empirical = (deviations[None, :] >= t[:, None] * scale).mean(axis=1)
    bound = ConcentrationBound.from_model(v_norm, m, n, q, c_scale)
    bound_value = bound.tail(t)

    def dominated(c: float) -> bool:
        tails = (deviations[None, :] >= t[:, None] * (c * u_norm)).mean(axis=1)
        return bool(np.all(tails <= bound_value))

    lo, hi = PROBE_C_RANGE
    if not dominated(hi):
        c_min = math.inf
    elif dominated(lo):
        c_min = lo
    else:
        for _ in range(60):
            mid = math.sqrt(lo * hi)
            if dominated(mid):
                hi = mid
            else:
                lo = mid
        c_min = hi

    return ProbeResult(
        t=t,
        empirical_tail=empirical,
        bound_value=bound_value,
        deviations=np.sort(deviations),
        bound=bound,
        u_norm=u_norm,
        c_min=c_min,
    )
