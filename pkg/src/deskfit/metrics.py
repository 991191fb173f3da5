"""Evaluation metrics: accuracy, Matthews correlation, MAE x 100, average precision.

Conventions where the textbook definitions are silent: MCC returns 0 when
any denominator factor is 0, and average precision groups tied scores into
a single threshold. All functions are pure and order-invariant.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import EmptyPredictions, LengthMismatch, NoPositives, NonBinary


def _paired(pred: Sequence, gold: Sequence) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred)
    g = np.asarray(gold)
    if p.shape != g.shape or p.ndim != 1:
        raise LengthMismatch(f"pred has shape {p.shape}, gold has shape {g.shape}")
    if p.size == 0:
        raise EmptyPredictions("cannot score zero examples")
    return p, g


def accuracy(pred: Sequence[int], gold: Sequence[int]) -> float:
    """Fraction of exactly-equal predictions."""
    p, g = _paired(pred, gold)
    return float(np.mean(p == g))


def mcc(pred: Sequence[int], gold: Sequence[int]) -> float:
    """Matthews correlation coefficient for binary labels, in [-1, 1]."""
    p, g = _paired(pred, gold)
    values = set(np.unique(p)) | set(np.unique(g))
    if not values <= {0, 1}:
        raise NonBinary(f"labels must be 0/1, saw {sorted(values)}")
    tp = int(np.sum((p == 1) & (g == 1)))
    tn = int(np.sum((p == 0) & (g == 0)))
    fp = int(np.sum((p == 1) & (g == 0)))
    fn = int(np.sum((p == 0) & (g == 1)))
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / float(np.sqrt(denom))


def mae_x100(pred: Sequence[int], gold: Sequence[int]) -> float:
    """100 times the mean absolute error over ordinal labels."""
    p, g = _paired(pred, gold)
    return 100.0 * float(np.mean(np.abs(p.astype(np.float64) - g.astype(np.float64))))


def average_precision(scores: Sequence[float], gold: Sequence[int]) -> float:
    """Step-wise average precision; tied scores form a single threshold."""
    s, g = _paired(scores, gold)
    if not set(np.unique(g)) <= {0, 1}:
        raise NonBinary("gold labels must be 0/1")
    n_pos = int(np.sum(g == 1))
    if n_pos == 0:
        raise NoPositives("average precision needs at least one positive")

    order = np.argsort(-s.astype(np.float64), kind="stable")
    s_sorted = s[order]
    g_sorted = g[order]
    ap = 0.0
    tp = fp = 0
    i = 0
    while i < len(s_sorted):
        j = i
        while j < len(s_sorted) and s_sorted[j] == s_sorted[i]:
            j += 1
        group_tp = int(np.sum(g_sorted[i:j] == 1))
        tp += group_tp
        fp += (j - i) - group_tp
        if group_tp:
            ap += (group_tp / n_pos) * (tp / (tp + fp))
        i = j
    return min(1.0, ap)  # accumulation can overshoot 1 by rounding
