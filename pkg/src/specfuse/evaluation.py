"""Clustering and retrieval quality metrics.

Clustering accuracy matches predicted clusters to true classes one-to-one by
optimal assignment on the contingency table. Retrieval quality thresholds a
pairwise distance matrix over all unordered point pairs (same class =
positive) and sweeps the threshold to build an ROC curve.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError, ParameterError


@dataclass(frozen=True)
class RocCurve:
    """ROC curve points plus the trapezoid-rule area under it.

    ``thresholds``, ``fpr`` and ``tpr`` are parallel arrays ordered by
    threshold; fpr and tpr are nondecreasing and the endpoints (0, 0) and
    (1, 1) are always present (the first threshold is -inf).
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def _as_label_vector(values, name):
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError(f"{name} must be a nonempty 1-d vector")
    return arr


def clustering_accuracy(labels, truth) -> float:
    """Best-matching clustering accuracy as a percentage in [0, 100].

    Maximizes, over one-to-one matchings between predicted clusters and true
    classes, the fraction of samples whose cluster maps to their class.
    Unequal cluster/class counts are handled by zero-padding the contingency
    table to square before the assignment.
    """
    pred = _as_label_vector(labels, "labels")
    true = _as_label_vector(truth, "truth")
    if pred.size != true.size:
        raise ParameterError(
            f"labels and truth must have equal length, got {pred.size} and {true.size}"
        )
    _, pred_ids = np.unique(pred, return_inverse=True)
    _, true_ids = np.unique(true, return_inverse=True)
    n_pred = pred_ids.max() + 1
    n_true = true_ids.max() + 1
    side = max(n_pred, n_true)
    table = np.zeros((side, side), dtype=np.int64)
    np.add.at(table, (pred_ids, true_ids), 1)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return 100.0 * table[rows, cols].sum() / pred.size


def roc_from_distances(dist: np.ndarray, truth) -> RocCurve:
    """ROC curve for same-class retrieval from a pairwise distance matrix.

    Over all unordered pairs i < j, a pair is predicted positive when its
    distance is at or below the threshold; thresholds sweep the sorted unique
    off-diagonal distances. The AUC is invariant under any strictly monotone
    transform of the distances.
    """
    d = np.asarray(dist, dtype=np.float64)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise ParameterError(f"distance matrix must be square, got shape {d.shape}")
    scale = np.abs(d).max()
    if scale > 0 and np.abs(d - d.T).max() > 1e-10 * scale:
        raise ParameterError("distance matrix must be symmetric")
    if n and np.abs(np.diag(d)).max() != 0.0:
        raise ParameterError("distance matrix must have a zero diagonal")
    true = _as_label_vector(truth, "truth")
    if true.size != n:
        raise ParameterError(f"truth must have length {n}, got {true.size}")

    iu, ju = np.triu_indices(n, k=1)
    pair_d = d[iu, ju]
    positive = true[iu] == true[ju]
    n_pos = int(positive.sum())
    n_neg = pair_d.size - n_pos
    if n_neg == 0:
        raise DataError("all samples share one class: no negative pairs, ROC undefined")
    if n_pos == 0:
        raise DataError("all samples differ in class: no positive pairs, ROC undefined")

    order = np.argsort(pair_d, kind="stable")
    sorted_d = pair_d[order]
    sorted_pos = positive[order]
    # cumulative counts at the last occurrence of each unique threshold
    last = np.flatnonzero(np.r_[sorted_d[1:] != sorted_d[:-1], True])
    tp = np.cumsum(sorted_pos)[last]
    fp = (last + 1) - tp

    thresholds = np.r_[-np.inf, sorted_d[last]]
    tpr = np.r_[0.0, tp / n_pos]
    fpr = np.r_[0.0, fp / n_neg]
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) * 0.5))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=auc)
