"""Support-recovery metrics: confusion counts, ROC curves, partial AUC.

All rates are computed over unordered off-diagonal pairs: with p nodes
there are p(p-1)/2 of them, |truth| positives and the rest negatives.
The headline metric is the partial AUC on FPR in [0, 0.15], normalized by
the cutoff so a perfect method scores 1; the chance diagonal scores
cutoff/2 = 0.075 at the default cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .structures import EdgeSet

DEFAULT_CUTOFF = 0.15


@dataclass(frozen=True)
class ConfusionPoint:
    """Counts and rates of one estimated edge set against the truth.

    ``lam`` is the penalty that produced the estimate, or None for
    synthetic anchor points. When there are no condition positives the
    tpr is vacuously 1 (nothing to find, nothing missed); when there are
    no condition negatives the fpr is vacuously 0. These conventions keep
    est == truth at (fpr, tpr) = (0, 1) in every case.
    """

    fpr: float
    tpr: float
    true_positives: int
    false_positives: int
    condition_positives: int
    condition_negatives: int
    lam: float | None = None


@dataclass(frozen=True)
class RocCurve:
    points: list
    partial_auc: float
    cutoff: float = DEFAULT_CUTOFF


def confusion(est: EdgeSet, truth: EdgeSet, lam: float | None = None) -> ConfusionPoint:
    """Confusion counts of an estimated edge set against the true one."""
    if est.dimension != truth.dimension:
        raise DimensionMismatch(
            f"estimate is over {est.dimension} nodes, truth over {truth.dimension}"
        )
    p = truth.dimension
    total_pairs = p * (p - 1) // 2
    cond_pos = len(truth.edges)
    cond_neg = total_pairs - cond_pos
    tp = len(est.edges & truth.edges)
    fp = len(est.edges - truth.edges)
    tpr = tp / cond_pos if cond_pos > 0 else 1.0
    fpr = fp / cond_neg if cond_neg > 0 else 0.0
    return ConfusionPoint(
        fpr=fpr, tpr=tpr, true_positives=tp, false_positives=fp,
        condition_positives=cond_pos, condition_negatives=cond_neg, lam=lam,
    )


def _as_xy(points) -> list:
    out = []
    for pt in points:
        if isinstance(pt, ConfusionPoint):
            out.append((float(pt.fpr), float(pt.tpr)))
        else:
            x, y = pt
            out.append((float(x), float(y)))
    return out


def partial_auc(points, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Normalized trapezoidal area under the ROC points on [0, cutoff].

    Points may be ConfusionPoint values or (fpr, tpr) pairs. They are
    sorted by fpr; at a tied fpr only the largest tpr is kept (upper
    envelope). The piecewise-linear curve through the surviving points is
    integrated from 0 to ``cutoff`` and divided by ``cutoff``.

    The points must include fpr = 0 and reach fpr >= cutoff (callers that
    build curves from paths get this from the (0,0) and (1,1) anchors).
    """
    if not 0 < cutoff <= 1:
        raise ValueError(f"cutoff must be in (0, 1], got {cutoff}")
    xy = _as_xy(points)
    if not xy:
        raise ValueError("no points given")
    envelope: dict = {}
    for x, y in xy:
        if x not in envelope or y > envelope[x]:
            envelope[x] = y
    xs = sorted(envelope)
    if xs[0] != 0.0:
        raise ValueError("curve must include a point at fpr = 0")
    if xs[-1] < cutoff:
        raise ValueError(f"curve must reach fpr >= cutoff ({cutoff})")
    area = 0.0
    for (x0, x1) in zip(xs, xs[1:]):
        if x0 >= cutoff:
            break
        y0, y1 = envelope[x0], envelope[x1]
        if x1 <= cutoff:
            area += (x1 - x0) * (y0 + y1) / 2.0
        else:
            # split the segment at the cutoff
            t = (cutoff - x0) / (x1 - x0)
            yc = y0 + t * (y1 - y0)
            area += (cutoff - x0) * (y0 + yc) / 2.0
            break
    return area / cutoff


def roc_from_path(path, truth: EdgeSet, cutoff: float = DEFAULT_CUTOFF) -> RocCurve:
    """ROC curve from a list of (lambda, EdgeSet) pairs.

    One confusion point per grid entry, plus (0, 0) and (1, 1) anchor
    points so the curve always spans the full FPR range. Points are sorted
    by (fpr, tpr), which makes the curve invariant to path order.
    """
    path = list(path)
    if not path:
        raise ValueError("empty path")
    points = [confusion(est, truth, lam=lam) for lam, est in path]
    p = truth.dimension
    total_pairs = p * (p - 1) // 2
    cond_pos = len(truth.edges)
    cond_neg = total_pairs - cond_pos
    anchors = [
        ConfusionPoint(fpr=0.0, tpr=0.0, true_positives=0, false_positives=0,
                       condition_positives=cond_pos, condition_negatives=cond_neg),
        ConfusionPoint(fpr=1.0, tpr=1.0, true_positives=cond_pos,
                       false_positives=cond_neg,
                       condition_positives=cond_pos, condition_negatives=cond_neg),
    ]
    points = sorted(points + anchors, key=lambda pt: (pt.fpr, pt.tpr))
    pauc = partial_auc(points, cutoff=cutoff)
    return RocCurve(points=points, partial_auc=pauc, cutoff=cutoff)


def aggregate(values) -> tuple[float, float]:
    """Sample mean and standard deviation (1/(R-1)); sd = 0 for R = 1."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("need at least one value")
    mean = math.fsum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    ss = math.fsum((v - mean) ** 2 for v in vals)
    return mean, math.sqrt(ss / (len(vals) - 1))
