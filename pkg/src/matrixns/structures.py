"""Synthetic precision-matrix generators and edge-set utilities.

Three sparsity patterns are provided: hub (one center per block of ten
nodes), band (bandwidth two with decaying signal), and Erdos-Renyi random.
Generators write exact values, so the true edge set of a generated model is
read off with ``zero_tol=0``; estimated matrices carry numerical dust and
callers pass a positive tolerance instead.

Node indices are 0-based everywhere in memory. CSV serialization (see
``matrixns.fileio``) is 1-indexed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import seeding
from .errors import InvalidDimension
from .linalg import check_spd, sym_eigen, symmetrize

#: generator tags; "custom" marks models built outside this module
STRUCTURE_TAGS = ("hub", "band", "random", "custom")


@dataclass(frozen=True)
class PrecisionModel:
    """A symmetric precision matrix with its generator provenance.

    ``omega`` is validated symmetric on construction. Positive definiteness
    is deliberately not enforced here: hub and random structures are only
    SPD after :func:`repair_pd`, which the sampling pipeline applies.
    """

    omega: np.ndarray
    structure_tag: str = "custom"
    rho: float = 0.0

    def __post_init__(self):
        if self.structure_tag not in STRUCTURE_TAGS:
            raise ValueError(f"unknown structure_tag `{self.structure_tag}`")
        object.__setattr__(self, "omega", symmetrize(self.omega))

    @property
    def dimension(self) -> int:
        return self.omega.shape[0]

    def edge_set(self, zero_tol: float = 0.0) -> "EdgeSet":
        return edge_set(self.omega, zero_tol)


@dataclass(frozen=True)
class EdgeSet:
    """Undirected graph over ``dimension`` nodes as canonical (a, b) pairs.

    Pairs are stored with a < b, 0-based, no self loops.
    """

    dimension: int
    edges: frozenset

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidDimension("dimension must be >= 1")
        canon = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self loop ({a},{b}) not allowed")
            if not (0 <= a < self.dimension and 0 <= b < self.dimension):
                raise ValueError(f"edge ({a},{b}) outside [0,{self.dimension})")
            canon.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(canon))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (min(a, b), max(a, b)) in self.edges

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.dimension, dtype=np.int64)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.dimension else 0

    def neighborhood(self, a: int) -> frozenset:
        return frozenset(b for b in range(self.dimension)
                         if b != a and (min(a, b), max(a, b)) in self.edges)


def edge_set(omega, zero_tol: float = 0.0) -> EdgeSet:
    """Edges {a, b} with |omega_ab| > zero_tol, a < b."""
    om = symmetrize(omega)
    p = om.shape[0]
    iu = np.triu_indices(p, k=1)
    mask = np.abs(om[iu]) > zero_tol
    pairs = frozenset(zip(iu[0][mask].tolist(), iu[1][mask].tolist()))
    return EdgeSet(dimension=p, edges=pairs)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_hub(p: int, rho: float) -> PrecisionModel:
    """Hub structure: one center per block of 10 consecutive nodes.

    Within block k (0-based blocks), the first node connects to the nine
    that follow it with value ``rho``. Diagonal is 1. Requires p to be a
    positive multiple of 10; yields 9p/10 edges. Apply :func:`repair_pd`
    before sampling, the raw matrix is generally not positive definite.
    """
    if p < 10 or p % 10 != 0:
        raise InvalidDimension(f"hub structure needs p to be a positive multiple of 10, got {p}")
    om = np.eye(p)
    for k in range(p // 10):
        center = 10 * k
        om[center, center + 1:center + 10] = rho
        om[center + 1:center + 10, center] = rho
    return PrecisionModel(omega=om, structure_tag="hub", rho=float(rho))


def gen_band(p: int, rho: float) -> PrecisionModel:
    """Band structure: ``rho`` on the first off-diagonal, ``rho/2`` on the second.

    Diagonal is 1; 2p-3 edges for rho != 0. Positive definite on its own for
    moderate rho (the sampling pipeline never repairs band models).
    """
    if p < 3:
        raise InvalidDimension(f"band structure needs p >= 3, got {p}")
    om = np.eye(p)
    idx = np.arange(p - 1)
    om[idx, idx + 1] = om[idx + 1, idx] = rho
    idx = np.arange(p - 2)
    om[idx, idx + 2] = om[idx + 2, idx] = rho / 2.0
    return PrecisionModel(omega=om, structure_tag="band", rho=float(rho))


def gen_random(p: int, rho: float, rng) -> PrecisionModel:
    """Erdos-Renyi structure: each pair gets value ``rho`` with probability min(0.05, 5/p).

    Deterministic given (p, rho, seed). Apply :func:`repair_pd` before use as
    a covariance inverse.
    """
    if p < 2:
        raise InvalidDimension(f"random structure needs p >= 2, got {p}")
    gen = seeding.as_generator(rng)
    prob = min(0.05, 5.0 / p)
    om = np.eye(p)
    # one Bernoulli draw per unordered pair, row-major upper-triangle order
    iu = np.triu_indices(p, k=1)
    hits = gen.random(iu[0].size) < prob
    om[iu[0][hits], iu[1][hits]] = rho
    om[iu[1][hits], iu[0][hits]] = rho
    return PrecisionModel(omega=om, structure_tag="random", rho=float(rho))


# ---------------------------------------------------------------------------
# pipeline transforms
# ---------------------------------------------------------------------------

def repair_pd(model: PrecisionModel) -> PrecisionModel:
    """Shift the diagonal to force positive definiteness.

    Returns omega + (0.05 + |lambda_min(omega)|) I. The shift is applied
    unconditionally (callers decide which structures need repairing; the
    benchmark pipeline repairs hub and random, never band). Off-diagonals,
    and therefore the edge set, are untouched.
    """
    eigvals, _ = sym_eigen(model.omega)
    shift = 0.05 + abs(float(eigvals[-1]))
    repaired = model.omega + shift * np.eye(model.dimension)
    return replace(model, omega=repaired)


def scale_diag_hetero(model: PrecisionModel, rng) -> PrecisionModel:
    """Multiply each diagonal entry by an independent U[1, 5] draw.

    One draw per diagonal index, in index order, from the supplied stream.
    Requires an SPD input; the result stays SPD because every multiplier
    is >= 1 (the update adds a nonnegative diagonal matrix).
    """
    check_spd(model.omega)
    gen = seeding.as_generator(rng)
    draws = gen.uniform(1.0, 5.0, size=model.dimension)
    scaled = model.omega.copy()
    np.fill_diagonal(scaled, np.diag(scaled) * draws)
    return replace(model, omega=scaled)
