"""Command line interface.

Subcommands: generate, bench, fit, connectivity, diagnose, ingest.
Outputs are CSV for numbers and JSON for metadata; each primary file
starts with `#` provenance lines (seed, config hash, version) so any
result can be traced to its inputs. Exit codes: 0 success, 2 bad
configuration or flags, 3 unreadable or malformed data, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, diagnostics, estimators, fileio, lasso, matnorm
from ._version import __version__
from .errors import (
    DimensionMismatch,
    EmptyGraph,
    InsufficientSamples,
    InvalidDimension,
    NonConvergence,
    NonFiniteEncountered,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularInput,
    TargetUnreachable,
    ZeroVariance,
)

NUMERICAL_ERRORS = (
    NotPositiveDefinite,
    NonConvergence,
    NonFiniteEncountered,
    SingularInput,
    TargetUnreachable,
    EmptyGraph,
)

DATA_ERRORS = (
    ShapeMismatch,
    DimensionMismatch,
    ZeroVariance,
    InsufficientSamples,
)

CONNECTIVITY_PROBE_BUDGET = 40


class ConfigError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--grid wants lo:hi:step (log2 exponents), got `{text}`")
    try:
        lo, hi, step = (float(tok) for tok in parts)
    except ValueError:
        raise ConfigError(f"--grid values must be numbers, got `{text}`") from None
    try:
        return lasso.log2_grid(lo, hi, step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _parse_cv(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"--cv wants K:global or K:individual, got `{text}`")
    try:
        folds = int(parts[0])
    except ValueError:
        raise ConfigError(f"--cv fold count must be an integer, got `{parts[0]}`") from None
    mode = parts[1]
    if mode not in ("global", "individual"):
        raise ConfigError(f"--cv mode must be global or individual, got `{mode}`")
    if folds < 2:
        raise ConfigError(f"--cv needs at least 2 folds, got {folds}")
    return folds, mode


def _load_config(args) -> bench.ExperimentConfig:
    if not args.config:
        raise ConfigError("this command needs --config <json path>")
    try:
        raw = fileio.read_json(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config JSON must be an object")
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    try:
        return bench.ExperimentConfig.from_dict(raw)
    except (ValueError, KeyError, TypeError, InvalidDimension) as exc:
        raise ConfigError(f"bad config: {exc}") from None


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_dataset(path) -> matnorm.MatrixDataset:
    p = Path(path)
    if p.is_dir():
        return fileio.read_dataset(p)
    return fileio.read_dataset_csv(p)


def _preprocess(d: matnorm.MatrixDataset, how: str, method: str):
    if how == "auto":
        how = "standardize" if method == "matrixns" else "center"
    if how == "standardize":
        return matnorm.standardize(d), "standardize"
    if how == "center":
        return matnorm.center(d), "center"
    return d, "none"


def cmd_generate(args) -> None:
    config = _load_config(args)
    out = _out_dir(args)
    cfg_hash = fileio.config_hash(config.as_dict())
    data, row_model, col_model, u, v = bench.replicate_dataset(config, 0)
    comments = fileio.provenance_lines(seed=config.seed, cfg_hash=cfg_hash)
    fileio.write_dataset(out, data, seed=config.seed, cfg_hash=cfg_hash,
                         extra_meta={"config": config.as_dict()})
    fileio.write_matrix(out / "row_covariance.csv", u, comments)
    fileio.write_matrix(out / "col_covariance.csv", v, comments)
    fileio.write_matrix(out / "row_precision.csv", row_model.omega, comments)
    fileio.write_matrix(out / "col_precision.csv", col_model.omega, comments)
    fileio.write_edges(out / "row_edges.csv", row_model.edge_set(), comments)
    fileio.write_edges(out / "col_edges.csv", col_model.edge_set(), comments)
    print(f"wrote dataset n={config.n} p={config.p} q={config.q} "
          f"({len(row_model.edge_set())} row edges, "
          f"{len(col_model.edge_set())} col edges) to {out}")


def cmd_bench(args) -> None:
    config = _load_config(args)
    out = _out_dir(args)
    cfg_hash = fileio.config_hash(config.as_dict())
    workers = args.workers or os.cpu_count() or 1
    record = bench.run_bench(config, workers=workers, keep_curves=args.keep_curves)
    comments = fileio.provenance_lines(seed=config.seed, cfg_hash=cfg_hash)

    lines = list(comments) + ["method,axis,mean_pauc,sd_pauc,replicates"]
    for method, axis, mean, sd, count in bench.aggregate_rows(record):
        lines.append(f"{method},{axis},{mean:.17g},{sd:.17g},{count}")
    (out / "bench_aggregate.csv").write_text("\n".join(lines) + "\n")

    lines = list(comments) + ["method,axis,replicate,pauc"]
    for method in config.methods:
        for axis in bench.AXES:
            for rep, val in zip(record.replicate_ids, record.values[method][axis]):
                lines.append(f"{method},{axis},{rep},{val:.17g}")
    (out / "bench_replicates.csv").write_text("\n".join(lines) + "\n")

    fileio.write_json(out / "run_record.json", record.as_dict())
    if args.keep_curves:
        for method in config.methods:
            for axis in bench.AXES:
                for rep, roc in zip(record.replicate_ids,
                                    record.curves[method][axis]):
                    fileio.write_roc(out / f"roc_{method}_{axis}_rep{rep}.csv",
                                     roc.points, comments)
    for method, axis, mean, sd, count in bench.aggregate_rows(record):
        print(f"{method:9s} {axis}: pauc {mean:.4f} +- {sd:.4f} over {count}")
    if record.failures:
        print(f"{len(record.failures)} replicate(s) failed; see run_record.json",
              file=sys.stderr)


def _fit_lambdas(args, d, axis, method):
    """Resolve the penalty choice: explicit --lam or a CV search."""
    if (args.lam is None) == (args.cv is None):
        raise ConfigError("pass exactly one of --lam or --cv")
    if args.lam is not None:
        if args.lam <= 0:
            raise ConfigError(f"--lam must be > 0, got {args.lam}")
        return float(args.lam), None
    if method != "matrixns":
        raise ConfigError("--cv tuning is defined for the nodewise method only")
    folds, mode = _parse_cv(args.cv)
    grid = _parse_grid(args.grid)
    tuned = estimators.cv_tune(d, axis, folds, grid, mode=mode, rng=args.seed)
    return tuned, {"folds": folds, "mode": mode, "grid": args.grid}


def cmd_fit(args) -> None:
    d = _load_dataset(args.dataset)
    prepped, prep_used = _preprocess(d, args.preprocess, args.method)
    out = _out_dir(args)
    tuned, cv_info = _fit_lambdas(args, prepped, args.axis, args.method)

    if args.method == "matrixns":
        if isinstance(tuned, list):
            edges = estimators.matrixns_fit_individual(prepped, args.axis, tuned,
                                                       rule=args.rule)
        else:
            edges = estimators.matrixns_fit(prepped, args.axis, tuned,
                                            rule=args.rule)
    else:
        edges = estimators.gemini_fit(prepped, args.axis, tuned)

    invocation = {
        "dataset": str(args.dataset),
        "method": args.method,
        "axis": args.axis,
        "rule": args.rule,
        "lambda": tuned if not isinstance(tuned, list) else None,
        "node_lambdas": tuned if isinstance(tuned, list) else None,
        "cv": cv_info,
        "preprocess": prep_used,
        "seed": args.seed,
    }
    cfg_hash = fileio.config_hash(invocation)
    comments = fileio.provenance_lines(seed=args.seed, cfg_hash=cfg_hash)
    fileio.write_edges(out / "edges.csv", edges, comments)
    sidecar = dict(invocation)
    sidecar.update({
        "n": d.n, "p": d.p, "q": d.q,
        "edges": len(edges),
        "dimension": edges.dimension,
        "config": cfg_hash,
        "version": __version__,
    })
    fileio.write_json(out / "fit.json", sidecar)
    lam_note = ("per-node lambdas in fit.json" if isinstance(tuned, list)
                else f"lambda={tuned:.6g}")
    print(f"{args.method} {args.axis}: {len(edges)} edges at {lam_note} -> {out}")


def _connectivity_fit(prepped, method, axis, rule):
    if method == "matrixns":
        return lambda lam: estimators.matrixns_fit(prepped, axis, lam, rule=rule)
    return lambda lam: estimators.gemini_fit(prepped, axis, lam)


def cmd_connectivity(args) -> None:
    if not 0.0 <= args.target < 1.0:
        raise ConfigError(f"--target must be in [0, 1), got {args.target}")
    if args.tol < 0:
        raise ConfigError(f"--tol must be >= 0, got {args.tol}")
    d = _load_dataset(args.dataset)
    prepped, prep_used = _preprocess(d, args.preprocess, args.method)
    grid = _parse_grid(args.grid)
    dim = prepped.p if args.axis == "row" else prepped.q
    possible = dim * (dim - 1) // 2
    if possible == 0:
        raise ConfigError(f"axis `{args.axis}` has a single node; no edges exist")

    if args.method == "matrixns":
        path = estimators.matrixns_path(prepped, args.axis, grid, rule=args.rule)
    else:
        path = estimators.gemini_path(prepped, args.axis, grid)
    fit_one = _connectivity_fit(prepped, args.method, args.axis, args.rule)

    probes = [(lam, e, len(e) / possible) for lam, e in path]
    best = min(probes, key=lambda t: abs(t[2] - args.target))
    scan_only = any(
        probes[i][2] > probes[i + 1][2] for i in range(len(probes) - 1)
    )
    if abs(best[2] - args.target) > args.tol and not scan_only:
        # level crosses the target inside some grid interval; refine there
        hi_lam, lo_lam = None, None
        for (lam_a, _, lv_a), (lam_b, _, lv_b) in zip(probes, probes[1:]):
            if (lv_a - args.target) * (lv_b - args.target) <= 0:
                hi_lam, lo_lam = lam_a, lam_b
                break
        budget = CONNECTIVITY_PROBE_BUDGET
        while hi_lam is not None and budget > 0:
            mid = math.sqrt(hi_lam * lo_lam)
            e = fit_one(mid)
            level = len(e) / possible
            if abs(level - args.target) < abs(best[2] - args.target):
                best = (mid, e, level)
            if abs(level - args.target) <= args.tol:
                break
            if level > args.target:
                lo_lam = mid
            else:
                hi_lam = mid
            budget -= 1

    lam, edges, level = best
    if abs(level - args.target) > args.tol:
        raise TargetUnreachable(
            f"no penalty reached connectivity {args.target} +- {args.tol}; "
            f"closest level {level:.6g} at lambda {lam:.6g}"
            + (" (grid scan only: edge count not monotone)" if scan_only else "")
        )

    out = _out_dir(args)
    invocation = {
        "dataset": str(args.dataset),
        "method": args.method,
        "axis": args.axis,
        "rule": args.rule,
        "target": args.target,
        "tol": args.tol,
        "grid": args.grid,
        "preprocess": prep_used,
    }
    cfg_hash = fileio.config_hash(invocation)
    comments = fileio.provenance_lines(cfg_hash=cfg_hash)
    fileio.write_edges(out / "edges.csv", edges, comments)
    summary = dict(invocation)
    summary.update({
        "lambda": lam,
        "level": level,
        "edges": len(edges),
        "possible": possible,
        "monotone_grid": not scan_only,
        "config": cfg_hash,
        "version": __version__,
    })
    fileio.write_json(out / "connectivity.json", summary)
    print(f"level {level:.4f} (target {args.target}) at lambda {lam:.6g}; "
          f"{len(edges)}/{possible} edges -> {out}")

    if args.groups:
        labels = _read_labels(args.groups, dim)
        lines = list(comments) + ["group_a,group_b,edges,possible,density"]
        for row in _group_table(edges, labels):
            ga, gb, cnt, poss, dens = row
            lines.append(f"{ga},{gb},{cnt},{poss},{dens:.17g}")
        (out / "connectivity_groups.csv").write_text("\n".join(lines) + "\n")
        print(f"group table ({len(set(labels))} groups) -> connectivity_groups.csv")


def _read_labels(path, dim: int) -> list:
    labels = []
    for _, line in fileio._data_lines(path):
        labels.append(line)
    if len(labels) != dim:
        raise ShapeMismatch(
            f"{path}: {len(labels)} labels for {dim} nodes on this axis"
        )
    return labels


def _group_table(edges, labels) -> list:
    """Within/between-group edge densities from a node labeling."""
    groups = sorted(set(labels))
    members = {g: [i for i, l in enumerate(labels) if l == g] for g in groups}
    rows = []
    for i, ga in enumerate(groups):
        for gb in groups[i:]:
            if ga == gb:
                k = len(members[ga])
                possible = k * (k - 1) // 2
            else:
                possible = len(members[ga]) * len(members[gb])
            count = 0
            for a, b in edges.edges:
                la, lb = labels[a], labels[b]
                if {la, lb} == {ga, gb} or (ga == gb and la == lb == ga):
                    count += 1
            density = count / possible if possible else 0.0
            rows.append((ga, gb, count, possible, density))
    return rows


def cmd_diagnose(args) -> None:
    u = fileio.read_matrix(args.u)
    v = fileio.read_matrix(args.v)
    diag = diagnostics.degree_and_bounds(u, v)
    p, q = u.shape[0], v.shape[0]
    out = _out_dir(args)

    report = {
        "inputs": {
            "u": str(args.u), "v": str(args.v), "n": args.n, "p": p, "q": q,
            "beta": args.beta, "c": args.c, "c1": args.c1, "c2": args.c2,
            "probe_size": args.probe_size, "probe_replicates": args.probe_replicates,
            "seed": args.seed,
        },
        "assumptions": {
            "incoherence": {"alpha": diag.alpha, "holds": diag.alpha > 0},
            "max_degree": {"d_max": diag.d_max},
            "eigenvalue_bounds": {
                "u": list(diag.eig_u), "v": list(diag.eig_v),
                "holds": diag.eig_u[0] > 0 and diag.eig_v[0] > 0,
            },
            "constants": {"u_max": diag.u_max, "v_avg": diag.v_avg},
        },
        "version": __version__,
    }

    if diag.alpha > 0:
        try:
            rule = diagnostics.lambda_rule(diag, args.n, p, q, args.beta, args.c)
            report["lambda_rule"] = {"value": rule}
        except EmptyGraph:
            rule = diagnostics.lambda_rule(diag, args.n, p, q, args.beta, args.c,
                                           empty_fallback=True)
            report["lambda_rule"] = {
                "value": rule,
                "note": "empty graph: incoherence branch only",
            }
        report["betamin_threshold"] = diagnostics.betamin_threshold(rule, diag)
        report["conditions"] = diagnostics.check_conditions(
            diag, args.n, p, q, args.beta, args.c1, args.c2
        ).as_dict()
    else:
        report["lambda_rule"] = {
            "value": None,
            "note": "incoherence assumption fails (alpha <= 0); "
                    "rule and conditions not evaluated",
        }

    m = args.probe_size if args.probe_size else max(1, min(diag.d_max + 1, p))
    probe = diagnostics.concentration_probe(
        u, v, m, args.n, args.probe_replicates, args.seed
    )
    comments = fileio.provenance_lines(seed=args.seed)
    lines = list(comments) + ["t,empirical_tail,bound"]
    for t, emp, bnd in probe.rows():
        lines.append(f"{t:.17g},{emp:.17g},{bnd:.17g}")
    (out / "probe.csv").write_text("\n".join(lines) + "\n")
    report["probe"] = {
        "subset_size": m,
        "replicates": args.probe_replicates,
        "c_min_dominating": probe.c_min if math.isfinite(probe.c_min) else None,
        "scales": {"a1": probe.bound.a1, "a2": probe.bound.a2, "a3": probe.bound.a3},
        "u_norm": probe.u_norm,
        "table": "probe.csv",
    }

    fileio.write_json(out / "diagnose.json", report)
    alpha_note = "holds" if diag.alpha > 0 else "FAILS"
    print(f"alpha={diag.alpha:.6g} ({alpha_note}), d_max={diag.d_max}, "
          f"u_max={diag.u_max:.6g}, v_avg={diag.v_avg:.6g} -> {out / 'diagnose.json'}")
    if "conditions" in report:
        verdict = report["conditions"]["verdict"]
        simp = report["conditions"]["simplified_holds"]
        print(f"conditions verdict: {verdict} (simplified regime: {simp}); "
              f"lambda rule {report['lambda_rule']['value']:.6g}")


def cmd_ingest(args) -> None:
    data, names = fileio.load_trial_directory(args.trials)
    d = matnorm.MatrixDataset(data=data)
    if args.preprocess == "standardize":
        d = matnorm.standardize(d)
    elif args.preprocess == "center":
        d = matnorm.center(d)
    out = _out_dir(args)
    fileio.write_dataset(out, d, extra_meta={
        "preprocess": args.preprocess,
        "source_files": names,
    })
    print(f"ingested {d.n} trials of {d.p}x{d.q} "
          f"(preprocess={args.preprocess}) -> {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrixns",
        description="Conditional-independence graphs for matrix-shaped "
                    "observations: nodewise regressions along rows or columns, "
                    "a correlation-based baseline, benchmarks, diagnostics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(sp, out_required=False):
        sp.add_argument("--out", required=out_required, default=None,
                        help="output directory" + ("" if out_required
                                                   else " (default: .)"))
        sp.add_argument("--seed", type=int, default=None,
                        help="seed override (default: config seed or 0)")

    gen = sub.add_parser("generate", help="write a synthetic dataset + truth")
    gen.add_argument("--config", required=True, help="experiment JSON")
    add_common(gen, out_required=True)
    gen.set_defaults(func=cmd_generate)

    ben = sub.add_parser("bench", help="Monte-Carlo benchmark over replicates")
    ben.add_argument("--config", required=True, help="experiment JSON")
    ben.add_argument("--workers", type=int, default=None,
                     help="process count (default: all cores)")
    ben.add_argument("--keep-curves", action="store_true",
                     help="also write every replicate's ROC curve")
    add_common(ben, out_required=True)
    ben.set_defaults(func=cmd_bench)

    fit = sub.add_parser("fit", help="estimate one edge set from a dataset")
    fit.add_argument("dataset", help="dataset directory or single-file CSV")
    fit.add_argument("--method", choices=("matrixns", "gemini"),
                     default="matrixns")
    fit.add_argument("--axis", choices=("row", "col"), default="row")
    fit.add_argument("--rule", choices=("and", "or"), default="and")
    fit.add_argument("--lam", type=float, default=None, help="penalty level")
    fit.add_argument("--cv", default=None, metavar="K:MODE",
                     help="cross-validate over --grid, e.g. 5:global")
    fit.add_argument("--grid", default="-10:2:0.25",
                     help="log2 grid lo:hi:step for --cv (default -10:2:0.25)")
    fit.add_argument("--preprocess",
                     choices=("auto", "standardize", "center", "none"),
                     default="auto",
                     help="auto = standardize for matrixns, center for gemini")
    add_common(fit)
    fit.set_defaults(func=cmd_fit, seed=0)

    conn = sub.add_parser("connectivity",
                          help="calibrate the penalty to an edge density")
    conn.add_argument("dataset", help="dataset directory or single-file CSV")
    conn.add_argument("--target", type=float, required=True,
                      help="desired edge density in [0, 1)")
    conn.add_argument("--tol", type=float, default=0.01,
                      help="acceptable |level - target| (default 0.01)")
    conn.add_argument("--method", choices=("matrixns", "gemini"),
                      default="matrixns")
    conn.add_argument("--axis", choices=("row", "col"), default="row")
    conn.add_argument("--rule", choices=("and", "or"), default="and")
    conn.add_argument("--grid", default="-10:2:0.25",
                      help="log2 search range lo:hi:step (default -10:2:0.25)")
    conn.add_argument("--preprocess",
                      choices=("auto", "standardize", "center", "none"),
                      default="auto")
    conn.add_argument("--groups", default=None,
                      help="node label file (one label per line) for a "
                           "within/between-group density table")
    add_common(conn)
    conn.set_defaults(func=cmd_connectivity)

    dia = sub.add_parser("diagnose",
                         help="recovery-guarantee diagnostics for a known model")
    dia.add_argument("--u", required=True, help="row covariance CSV")
    dia.add_argument("--v", required=True, help="column covariance CSV")
    dia.add_argument("--n", type=int, required=True,
                     help="hypothesized observation count")
    dia.add_argument("--beta", type=float, default=2.0,
                     help="confidence exponent (default 2)")
    dia.add_argument("--c", type=float, default=1.0, help="rule constant")
    dia.add_argument("--c1", type=float, default=1.0, help="condition constant")
    dia.add_argument("--c2", type=float, default=1.0, help="condition constant")
    dia.add_argument("--probe-size", type=int, default=None,
                     help="subset size for the concentration probe "
                          "(default: d_max + 1, capped at p)")
    dia.add_argument("--probe-replicates", type=int, default=200)
    add_common(dia)
    dia.set_defaults(func=cmd_diagnose, seed=0)

    ing = sub.add_parser("ingest", help="normalize a directory of trial CSVs")
    ing.add_argument("trials", help="directory of per-trial CSV matrices")
    ing.add_argument("--preprocess",
                     choices=("standardize", "center", "none"), default="none")
    add_common(ing, out_required=True)
    ing.set_defaults(func=cmd_ingest)

    return parser


def _fuse_grid(argv: list) -> list:
    """Join `--grid -4:2:0.5` into `--grid=-4:2:0.5`.

    Grid exponents usually start negative and argparse would read the
    value as an unknown option.
    """
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append("--grid=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_fuse_grid(list(sys.argv[1:] if argv is None else argv)))
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    if getattr(args, "seed", None) is None and args.command in ("fit", "diagnose"):
        args.seed = 0
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidDimension as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
