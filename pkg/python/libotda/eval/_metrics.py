from typing import Any, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from libotda.core import ValidationError


def accuracy(predicted: Sequence, truth: Sequence) -> float:
    """Fraction of predictions equal to the true label"""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ValidationError(
            f"accuracy: {predicted.size} predictions for {truth.size} labels"
        )
    if truth.size == 0:
        raise ValidationError("accuracy: no labels")
    return float(np.mean(predicted == truth))


def auc(
    scores: Sequence[float],
    truth: Sequence,
    positive: Optional[Any] = None,
) -> float:
    """Area under the ROC curve, as the Mann-Whitney statistic

    The fraction of (positive, negative) pairs in which the positive sample scores
    higher, with ties counted as one half.

    Parameters
    ----------
    scores : array_like[float]
        Real score per sample, larger means more positive.
    truth : array_like
        Binary labels; both classes must be present.
    positive : Optional[Any] = None
        The positive label. If None, the larger of the two labels.

    Returns
    -------
    value : float
        AUC in [0, 1].
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise ValidationError(f"auc: {scores.size} scores for {truth.size} labels")
    if not np.all(np.isfinite(scores)):
        raise ValidationError("auc: scores must be finite")
    classes = np.unique(truth)
    if classes.size != 2:
        raise ValidationError(f"auc needs two classes, got {classes.size}")
    if positive is None:
        positive = classes[1]
    elif positive not in classes:
        raise ValidationError(f"auc: positive label {positive!r} not in truth")

    is_positive = truth == positive
    n_positive = int(np.count_nonzero(is_positive))
    n_negative = truth.size - n_positive
    ranks = rankdata(scores, method="average")
    u = ranks[is_positive].sum() - n_positive * (n_positive + 1) / 2.0
    return float(u / (n_positive * n_negative))
