"""Monte-Carlo benchmark harness: generate, fit, score, aggregate.

One replicate = draw a fresh model pair and dataset, fit every requested
method along the penalty grid on both axes, and score each fit's ROC
against the generating truth. Replicate i derives all of its randomness
from the master seed and i alone, so results are identical no matter how
replicates are scheduled across workers; aggregation merges by replicate
index. A replicate that fails (a non-PD model configuration, degenerate
sample) is excluded and counted, never silently patched.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import estimators, evaluation, lasso, linalg, matnorm, seeding
from ._version import __version__
from .errors import InvalidDimension
from .structures import (
    PrecisionModel,
    gen_band,
    gen_hub,
    gen_random,
    repair_pd,
    scale_diag_hetero,
)

METHODS = ("matrixns", "gemini")
VARIANCE_MODES = ("heterogeneous", "homogeneous")
AXES = ("row", "col")

#: generator kinds paired with their usual coupling strength
DEFAULT_RHO = {"hub": 0.4, "band": 0.6, "random": 0.4}

DEFAULT_GRID = (-10.0, 2.0, 0.25)


@dataclass(frozen=True)
class StructureSpec:
    """One precision generator: its kind and coupling strength."""

    kind: str
    rho: float

    def __post_init__(self):
        if self.kind not in DEFAULT_RHO:
            raise ValueError(
                f"unknown structure `{self.kind}`; expected one of {sorted(DEFAULT_RHO)}"
            )
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")

    @classmethod
    def from_value(cls, value) -> "StructureSpec":
        """Accept `\"band\"`, `(\"band\", 0.6)`, or {\"kind\": ..., \"rho\": ...}."""
        if isinstance(value, StructureSpec):
            return value
        if isinstance(value, str):
            value = {"kind": value}
        if isinstance(value, dict):
            extra = set(value) - {"kind", "rho"}
            if extra:
                raise ValueError(f"unknown structure fields {sorted(extra)}")
            kind = value["kind"]
            if kind not in DEFAULT_RHO:
                raise ValueError(
                    f"unknown structure `{kind}`; expected one of {sorted(DEFAULT_RHO)}"
                )
            return cls(kind=kind, rho=float(value.get("rho", DEFAULT_RHO[kind])))
        kind, rho = value
        return cls(kind=kind, rho=float(rho))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "rho": self.rho}


@dataclass(frozen=True)
class ExperimentConfig:
    """Full benchmark description; everything an aggregate depends on."""

    n: int
    p: int
    q: int
    row_structure: StructureSpec
    col_structure: StructureSpec
    variance_mode: str = "heterogeneous"
    lambda_grid: tuple = DEFAULT_GRID
    replicates: int = 100
    methods: tuple = METHODS
    rule: str = "and"
    seed: int = 0
    cv: tuple | None = None

    def __post_init__(self):
        if min(self.n, self.p, self.q) < 1:
            raise InvalidDimension(
                f"n, p, q must be >= 1, got ({self.n}, {self.p}, {self.q})"
            )
        if self.variance_mode not in VARIANCE_MODES:
            raise ValueError(f"variance_mode must be one of {VARIANCE_MODES}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if len(self.lambda_grid) != 3:
            raise ValueError("lambda_grid must be (log2_lo, log2_hi, log2_step)")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method `{m}`; expected subset of {METHODS}")
        estimators.CombineRule(self.rule)
        if self.cv is not None and len(self.cv) != 2:
            raise ValueError("cv must be (folds, mode)")
        self.lambdas()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {
            "n", "p", "q", "row_structure", "col_structure", "variance_mode",
            "lambda_grid", "replicates", "methods", "rule", "seed", "cv",
        }
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        missing = {"n", "p", "q", "row_structure", "col_structure"} - set(d)
        if missing:
            raise ValueError(f"config missing required fields {sorted(missing)}")
        kwargs = dict(d)
        kwargs["row_structure"] = StructureSpec.from_value(d["row_structure"])
        kwargs["col_structure"] = StructureSpec.from_value(d["col_structure"])
        for key in ("n", "p", "q", "replicates", "seed"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        if "lambda_grid" in kwargs:
            kwargs["lambda_grid"] = tuple(float(x) for x in kwargs["lambda_grid"])
        if "methods" in kwargs:
            kwargs["methods"] = tuple(kwargs["methods"])
        if "cv" in kwargs and kwargs["cv"] is not None:
            folds, mode = kwargs["cv"]
            kwargs["cv"] = (int(folds), str(mode))
        return cls(**kwargs)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "row_structure": self.row_structure.as_dict(),
            "col_structure": self.col_structure.as_dict(),
            "variance_mode": self.variance_mode,
            "lambda_grid": list(self.lambda_grid),
            "replicates": self.replicates,
            "methods": list(self.methods),
            "rule": self.rule,
            "seed": self.seed,
            "cv": list(self.cv) if self.cv is not None else None,
        }

    def lambdas(self) -> np.ndarray:
        lo, hi, step = self.lambda_grid
        return lasso.log2_grid(lo, hi, step)


def build_precision(spec: StructureSpec, dim: int, gen,
                    variance_mode: str) -> PrecisionModel:
    """Generator pipeline for one axis: draw, repair if needed, scale.

    Band structures are taken as generated (they must already be PD;
    sampling fails loudly otherwise), hub and random always get the PD
    repair shift. Heterogeneous mode then scales each diagonal entry by
    an independent uniform draw.
    """
    if spec.kind == "band":
        model = gen_band(dim, spec.rho)
    elif spec.kind == "hub":
        model = repair_pd(gen_hub(dim, spec.rho))
    else:
        model = repair_pd(gen_random(dim, spec.rho, gen))
    if variance_mode == "heterogeneous":
        model = scale_diag_hetero(model, gen)
    return model


def replicate_models(config: ExperimentConfig, i: int):
    """Model pair for replicate i, from its deterministic child streams."""
    master = seeding.as_seed_sequence(config.seed)
    row_gen = seeding.as_generator(seeding.child(master, i, 0))
    col_gen = seeding.as_generator(seeding.child(master, i, 1))
    row_model = build_precision(config.row_structure, config.p, row_gen,
                                config.variance_mode)
    col_model = build_precision(config.col_structure, config.q, col_gen,
                                config.variance_mode)
    return row_model, col_model


def replicate_dataset(config: ExperimentConfig, i: int):
    """Models, covariances, and sampled data for replicate i.

    The generate command writes exactly this for i=0, so a benchmark's
    first replicate is reproducible as a standalone dataset.
    """
    master = seeding.as_seed_sequence(config.seed)
    row_model, col_model = replicate_models(config, i)
    u = linalg.spd_inverse(row_model.omega)
    v = linalg.spd_inverse(col_model.omega)
    data = matnorm.sample(config.n, u, v, seeding.child(master, i, 2))
    return data, row_model, col_model, u, v


def run_replicate(config: ExperimentConfig, i: int,
                  keep_curves: bool = False) -> dict:
    """One full replicate: models, data, every method on both axes.

    Returns {"replicate": i, "pauc": {method: {axis: value}}} plus the
    ROC curves when asked. Estimation inputs follow each method's
    preprocessing contract: standardized for the regressions, centered
    for the correlation route.
    """
    data, row_model, col_model, _, _ = replicate_dataset(config, i)
    truth = {"row": row_model.edge_set(), "col": col_model.edge_set()}
    lambdas = config.lambdas()

    pauc: dict = {}
    curves: dict = {}
    for method in config.methods:
        if method == "matrixns":
            prepped = matnorm.standardize(data)
        else:
            prepped = matnorm.center(data)
        pauc[method] = {}
        curves[method] = {}
        for axis in AXES:
            if method == "matrixns":
                path = estimators.matrixns_path(prepped, axis, lambdas,
                                                rule=config.rule)
            else:
                path = estimators.gemini_path(prepped, axis, lambdas)
            roc = evaluation.roc_from_path(path, truth[axis])
            pauc[method][axis] = roc.partial_auc
            if keep_curves:
                curves[method][axis] = roc
    out = {"replicate": i, "pauc": pauc}
    if keep_curves:
        out["curves"] = curves
    return out


def _replicate_guarded(config: ExperimentConfig, i: int, keep_curves: bool):
    try:
        return run_replicate(config, i, keep_curves)
    except Exception as exc:
        return {"replicate": i, "error": f"{type(exc).__name__}: {exc}"}


@dataclass(frozen=True)
class RunRecord:
    """Everything a benchmark run produced, aggregates recomputable.

    ``values[method][axis]`` lists per-replicate pAUCs in replicate
    order, one entry per *successful* replicate (ids in
    ``replicate_ids``); failures carry (replicate, message) pairs.
    """

    config: ExperimentConfig
    values: dict
    replicate_ids: tuple
    failures: tuple
    wall_clock: float
    version: str
    curves: dict | None = None

    def aggregates(self) -> dict:
        """{(method, axis): (mean, sd)} over successful replicates."""
        out = {}
        for method in self.config.methods:
            for axis in AXES:
                out[(method, axis)] = evaluation.aggregate(self.values[method][axis])
        return out

    def as_dict(self) -> dict:
        agg = {
            f"{method}.{axis}": {"mean": mean, "sd": sd}
            for (method, axis), (mean, sd) in self.aggregates().items()
        }
        return {
            "config": self.config.as_dict(),
            "values": self.values,
            "replicate_ids": list(self.replicate_ids),
            "failures": [list(f) for f in self.failures],
            "aggregates": agg,
            "wall_clock_seconds": self.wall_clock,
            "version": self.version,
        }


def run_bench(config: ExperimentConfig, workers: int = 1,
              keep_curves: bool = False) -> RunRecord:
    """Run every replicate and merge results by replicate index.

    ``workers`` > 1 fans replicates out to a process pool; the merged
    record is identical to the single-process one because each
    replicate's randomness is a pure function of (seed, index).
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    start = time.perf_counter()
    indices = range(config.replicates)
    if workers == 1:
        results = [_replicate_guarded(config, i, keep_curves) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_guarded, [config] * config.replicates,
                                    indices, [keep_curves] * config.replicates))
    results.sort(key=lambda r: r["replicate"])

    values = {m: {a: [] for a in AXES} for m in config.methods}
    curves = {m: {a: [] for a in AXES} for m in config.methods} if keep_curves else None
    ok_ids = []
    failures = []
    for res in results:
        if "error" in res:
            failures.append((res["replicate"], res["error"]))
            continue
        ok_ids.append(res["replicate"])
        for method in config.methods:
            for axis in AXES:
                values[method][axis].append(res["pauc"][method][axis])
                if keep_curves:
                    curves[method][axis].append(res["curves"][method][axis])
    if not ok_ids:
        first = failures[0][1] if failures else "no replicates ran"
        raise RuntimeError(f"every replicate failed; first error: {first}")
    return RunRecord(
        config=config,
        values=values,
        replicate_ids=tuple(ok_ids),
        failures=tuple(failures),
        wall_clock=time.perf_counter() - start,
        version=__version__,
        curves=curves,
    )


def aggregate_rows(record: RunRecord) -> list:
    """CSV rows (method, axis, mean, sd, count) in a fixed order."""
    rows = []
    for method in record.config.methods:
        for axis in AXES:
            mean, sd = evaluation.aggregate(record.values[method][axis])
            rows.append((method, axis, mean, sd, len(record.values[method][axis])))
    return rows
