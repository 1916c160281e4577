"""ROC construction and partial AUC scoring of edge-set estimates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matrixns.errors import DimensionMismatch
from matrixns.evaluation import aggregate, confusion, partial_auc, roc_from_path
from matrixns.structures import EdgeSet, gen_band


def edges(p, pairs):
    return EdgeSet(dimension=p, edges=frozenset(pairs))


# ---------------------------------------------------------------------------
# confusion
# ---------------------------------------------------------------------------

def test_confusion_hand_example():
    truth = edges(4, {(0, 1), (1, 2), (2, 3)})
    est = edges(4, {(0, 1), (0, 2)})
    pt = confusion(est, truth)
    assert pt.true_positives == 1
    assert pt.false_positives == 1
    assert pt.tpr == pytest.approx(1 / 3)
    assert pt.fpr == pytest.approx(1 / 3)


def test_confusion_perfect_and_empty():
    truth = gen_band(5, 0.6).edge_set()
    exact = confusion(truth, truth)
    assert (exact.fpr, exact.tpr) == (0.0, 1.0)
    empty = confusion(edges(5, set()), truth)
    assert (empty.fpr, empty.tpr) == (0.0, 0.0)


def test_confusion_vacuous_conventions():
    # empty truth: tpr is vacuously 1
    pt = confusion(edges(3, set()), edges(3, set()))
    assert (pt.fpr, pt.tpr) == (0.0, 1.0)
    # complete truth: fpr is vacuously 0
    full = {(a, b) for a in range(3) for b in range(a + 1, 3)}
    pt = confusion(edges(3, full), edges(3, full))
    assert (pt.fpr, pt.tpr) == (0.0, 1.0)


def test_confusion_counts_add_up():
    truth = gen_band(6, 0.5).edge_set()
    est = edges(6, {(0, 1), (0, 5), (2, 4)})
    pt = confusion(est, truth)
    assert pt.true_positives + pt.false_positives == len(est.edges)
    assert pt.condition_positives == len(truth.edges)
    assert pt.condition_negatives == 15 - len(truth.edges)


def test_confusion_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        confusion(edges(3, set()), edges(4, set()))


# ---------------------------------------------------------------------------
# partial AUC
# ---------------------------------------------------------------------------

def test_pauc_diagonal():
    # straight line tpr = fpr: area 0.5 * 0.15 over a 0.15 window
    assert partial_auc([(0.0, 0.0), (1.0, 1.0)]) == pytest.approx(0.075, abs=1e-12)


def test_pauc_perfect():
    assert partial_auc([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]) == pytest.approx(1.0)


def test_pauc_staircase_golden():
    pts = [(0.0, 0.0), (0.05, 0.6), (0.10, 0.8), (1.0, 1.0)]
    tpr_cut = 0.8 + 0.2 * (0.05 / 0.9)
    want = (0.05 * 0.3 + 0.05 * 0.7 + 0.05 * (0.8 + tpr_cut) / 2.0) / 0.15
    assert partial_auc(pts) == pytest.approx(want, abs=1e-12)


def test_pauc_upper_envelope():
    # two points at the same fpr: only the higher tpr matters
    pts = [(0.0, 0.0), (0.05, 0.2), (0.05, 0.9), (1.0, 1.0)]
    ref = partial_auc([(0.0, 0.0), (0.05, 0.9), (1.0, 1.0)])
    assert partial_auc(pts) == pytest.approx(ref, abs=1e-15)


def test_pauc_cutoff_validation():
    with pytest.raises(ValueError):
        partial_auc([(0.0, 0.0), (1.0, 1.0)], cutoff=0.0)
    with pytest.raises(ValueError):
        partial_auc([(0.0, 0.0), (1.0, 1.0)], cutoff=1.5)
    with pytest.raises(ValueError):
        partial_auc([(0.1, 0.5), (1.0, 1.0)])  # no fpr = 0 point
    with pytest.raises(ValueError):
        partial_auc([(0.0, 0.0), (0.1, 0.5)])  # never reaches the cutoff
    with pytest.raises(ValueError):
        partial_auc([])


def test_pauc_dominance_monotone():
    rng = np.random.default_rng(2)
    for _ in range(20):
        xs = np.sort(np.concatenate([[0.0, 1.0], rng.random(6)]))
        lo = np.sort(rng.random(8))
        hi = np.clip(lo + rng.random(8) * (1 - lo), 0, 1)
        assert (partial_auc(list(zip(xs, hi)))
                >= partial_auc(list(zip(xs, lo))) - 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=0, max_size=8),
       st.floats(0.05, 1.0))
def test_pauc_bounded(extra, cutoff):
    pts = [(0.0, 0.0), (1.0, 1.0)] + extra
    val = partial_auc(pts, cutoff=cutoff)
    assert 0.0 <= val <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# roc_from_path
# ---------------------------------------------------------------------------

def test_roc_single_point_path():
    truth = gen_band(4, 0.6).edge_set()
    full = {(a, b) for a in range(4) for b in range(a + 1, 4)}
    path = [(1.0, edges(4, set())), (0.5, edges(4, full))]
    curve = roc_from_path(path, truth)
    assert curve.partial_auc == pytest.approx(0.075, abs=1e-12)
    # anchors present
    assert curve.points[0].fpr == 0.0 and curve.points[0].tpr == 0.0
    assert curve.points[-1].fpr == 1.0 and curve.points[-1].tpr == 1.0


def test_roc_order_invariance():
    truth = gen_band(5, 0.6).edge_set()
    path = [
        (1.0, edges(5, set())),
        (0.5, edges(5, {(0, 1), (1, 2)})),
        (0.1, edges(5, {(0, 1), (1, 2), (2, 3), (0, 4)})),
    ]
    fwd = roc_from_path(path, truth)
    rev = roc_from_path(path[::-1], truth)
    assert fwd.partial_auc == rev.partial_auc
    assert [(p.fpr, p.tpr) for p in fwd.points] == [(p.fpr, p.tpr) for p in rev.points]


def test_roc_perfect_path_is_one():
    truth = gen_band(6, 0.6).edge_set()
    curve = roc_from_path([(0.2, truth)], truth)
    assert curve.partial_auc == 1.0


def test_roc_keeps_lambda():
    truth = gen_band(4, 0.6).edge_set()
    curve = roc_from_path([(0.7, edges(4, set()))], truth)
    lams = {pt.lam for pt in curve.points}
    assert 0.7 in lams
    assert None in lams  # anchors carry no lambda
    with pytest.raises(ValueError):
        roc_from_path([], truth)


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------

def test_aggregate_golden_values():
    assert aggregate([0.5]) == (0.5, 0.0)
    mean, sd = aggregate([0.0, 1.0])
    assert mean == 0.5
    assert sd == pytest.approx(np.sqrt(0.5), abs=1e-15)
    mean, sd = aggregate([0.3, 0.3, 0.3])
    assert (mean, sd) == (0.3, 0.0)


def test_aggregate_matches_numpy():
    rng = np.random.default_rng(5)
    vals = rng.random(17)
    mean, sd = aggregate(vals)
    assert mean == pytest.approx(vals.mean(), abs=1e-15)
    assert sd == pytest.approx(vals.std(ddof=1), abs=1e-15)


def test_aggregate_empty_raises():
    with pytest.raises(ValueError):
        aggregate([])
