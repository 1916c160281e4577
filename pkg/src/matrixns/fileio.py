"""Language-neutral on-disk formats: CSV for numbers, JSON for metadata.

Matrices are dense, headerless, one row per line; edge lists are
two-column (a, b) pairs, 1-indexed on disk and 0-based in memory.
Floats print with enough digits to round-trip float64 exactly, so a
fixed seed gives byte-identical files. Leading `#` lines carry
provenance (seed, config hash, package version) and are ignored by
every reader.

A dataset lives in a directory: `meta.json` plus one `obs_<i>.csv` per
observation. A single-file variant stacks all observations in one CSV
behind a `# n p q` header line.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import ShapeMismatch
from .matnorm import MatrixDataset
from .structures import EdgeSet

FLOAT_FMT = ".17g"

META_NAME = "meta.json"


def config_hash(obj) -> str:
    """Short stable digest of any JSON-serializable configuration."""
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def provenance_lines(seed=None, cfg_hash: str | None = None, **extra) -> list:
    """`# key: value` comment lines every primary output starts with."""
    fields = {"version": __version__}
    if seed is not None:
        fields["seed"] = seed
    if cfg_hash is not None:
        fields["config"] = cfg_hash
    fields.update(extra)
    return [f"# {k}: {v}" for k, v in fields.items()]


def _format_row(row) -> str:
    return ",".join(format(float(x), FLOAT_FMT) for x in row)


def write_matrix(path, m, comments=()) -> None:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={m.ndim}")
    lines = list(comments) + [_format_row(row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def _data_lines(path) -> list:
    out = []
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((ln, line))
    return out


def read_matrix(path) -> np.ndarray:
    """Parse a dense CSV matrix, skipping comments and blank lines."""
    rows = []
    width = None
    for ln, line in _data_lines(path):
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise ValueError(f"{path}:{ln}: {exc}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ShapeMismatch(
                f"{path}:{ln}: row has {len(row)} columns, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def write_edges(path, e: EdgeSet, comments=()) -> None:
    """Edge list as 1-indexed (a, b) pairs, sorted for determinism."""
    lines = list(comments)
    lines += [f"{a + 1},{b + 1}" for a, b in sorted(e.edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edges(path, dimension: int) -> EdgeSet:
    pairs = set()
    for ln, line in _data_lines(path):
        parts = line.split(",")
        if len(parts) != 2:
            raise ShapeMismatch(f"{path}:{ln}: expected two columns")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"{path}:{ln}: {exc}") from None
        pairs.add((a - 1, b - 1))
    return EdgeSet(dimension=dimension, edges=frozenset(pairs))


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def obs_name(i: int) -> str:
    return f"obs_{i}.csv"


def write_dataset(dirpath, d: MatrixDataset, seed=None,
                  cfg_hash: str | None = None, extra_meta=None) -> Path:
    """Write a dataset directory: meta.json plus one CSV per observation."""
    out = Path(dirpath)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "n": d.n,
        "p": d.p,
        "q": d.q,
        "standardized": d.standardized,
        "seed": seed,
        "config": cfg_hash,
        "version": __version__,
    }
    if extra_meta:
        meta.update(extra_meta)
    write_json(out / META_NAME, meta)
    comments = provenance_lines(seed=seed, cfg_hash=cfg_hash)
    for i in range(d.n):
        write_matrix(out / obs_name(i), d.data[i], comments)
    return out


def read_dataset(dirpath) -> MatrixDataset:
    """Load a dataset directory, checking every observation's shape."""
    root = Path(dirpath)
    meta = read_json(root / META_NAME)
    n, p, q = int(meta["n"]), int(meta["p"]), int(meta["q"])
    data = np.empty((n, p, q), dtype=np.float64)
    for i in range(n):
        path = root / obs_name(i)
        m = read_matrix(path)
        if m.shape != (p, q):
            raise ShapeMismatch(
                f"{path}: observation shape {m.shape}, meta says ({p}, {q})"
            )
        data[i] = m
    return MatrixDataset(data=data, standardized=bool(meta.get("standardized", False)))


def write_dataset_csv(path, d: MatrixDataset, comments=()) -> None:
    """Single-file variant: `# n p q` header, then n*p rows of q values."""
    lines = list(comments)
    lines.append(f"# {d.n} {d.p} {d.q}")
    for i in range(d.n):
        lines += [_format_row(row) for row in d.data[i]]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_csv(path) -> MatrixDataset:
    header = None
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line.startswith("#"):
            continue
        parts = line[1:].split()
        if len(parts) == 3 and all(tok.isdigit() for tok in parts):
            header = tuple(int(tok) for tok in parts)
            break
    if header is None:
        raise ValueError(f"{path}: missing `# n p q` header line")
    n, p, q = header
    flat = read_matrix(path)
    if flat.shape != (n * p, q):
        raise ShapeMismatch(
            f"{path}: {flat.shape[0]} rows of {flat.shape[1]}, "
            f"header says {n}*{p} rows of {q}"
        )
    return MatrixDataset(data=flat.reshape(n, p, q), standardized=False)


def load_trial_directory(dirpath) -> tuple:
    """Stack every `*.csv` trial in a directory into one dataset.

    Files are taken in sorted-name order; all must share one shape, and
    the first mismatch names its file. Returns (data, filenames).
    """
    root = Path(dirpath)
    names = sorted(f.name for f in root.glob("*.csv"))
    if not names:
        raise ValueError(f"{root}: no CSV trial files found")
    mats = []
    shape = None
    for name in names:
        m = read_matrix(root / name)
        if shape is None:
            shape = m.shape
        elif m.shape != shape:
            raise ShapeMismatch(
                f"{root / name}: trial shape {m.shape}, expected {shape} "
                f"(from {names[0]})"
            )
        mats.append(m)
    return np.stack(mats), names


def write_roc(path, points, comments=()) -> None:
    """ROC points as (lambda, fpr, tpr) rows; anchors have empty lambda."""
    lines = list(comments) + ["lambda,fpr,tpr"]
    for pt in points:
        lam = "" if pt.lam is None else format(pt.lam, FLOAT_FMT)
        lines.append(f"{lam},{format(pt.fpr, FLOAT_FMT)},{format(pt.tpr, FLOAT_FMT)}")
    Path(path).write_text("\n".join(lines) + "\n")
