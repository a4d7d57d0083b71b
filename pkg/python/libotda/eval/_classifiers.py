import logging
from collections import Counter
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from libotda.core import (
    DataMatrix,
    RandomNumberEngine,
    RandomNumberGenerator,
    ValidationError,
    as_data,
)

logger = logging.getLogger(__name__)


def _labeled_training_set(train: Union[DataMatrix, np.ndarray]) -> DataMatrix:
    train = as_data(train)
    if train.n_rows == 0:
        raise ValidationError("training set is empty")
    if not train.has_labels():
        raise ValidationError("training set has no labels")
    return train


def knn_predict(
    train: DataMatrix,
    test: Union[DataMatrix, np.ndarray],
    k: int = 1,
) -> np.ndarray:
    """k-nearest-neighbor classification by Euclidean distance

    Parameters
    ----------
    train : DataMatrix
        Labeled training samples.
    test : DataMatrix
        Samples to classify, same column count. Labels, if any, are ignored.
    k : int = 1
        Number of neighbors, ``1 <= k <= train.n_rows``.

    Returns
    -------
    predicted : np.ndarray, shape=(test.n_rows,)
        Majority label among the k nearest training rows. Distance ties go to the
        lower training row index; among labels with equal votes, the label of the
        nearest such neighbor wins.
    """
    train = _labeled_training_set(train)
    test = as_data(test)
    if test.n_cols != train.n_cols:
        raise ValidationError(
            f"test has {test.n_cols} columns but training set has {train.n_cols}"
        )
    if int(k) != k or not 1 <= k <= train.n_rows:
        raise ValidationError(f"k must be an integer in [1, {train.n_rows}], got {k}")
    k = int(k)

    dist = cdist(test.values, train.values, metric="sqeuclidean")
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]
    labels = train.labels
    if k == 1:
        return labels[neighbors[:, 0]]

    predicted = []
    for row in neighbors:
        votes = Counter(labels[row].tolist())
        best = max(votes.values())
        # row is sorted by distance, so the first tied label is the nearest one
        predicted.append(next(x for x in labels[row] if votes[x.item()] == best))
    return np.array(predicted, dtype=labels.dtype)


class LinearSVM:
    """Binary linear classifier ``sign(x . weights + bias)``

    Parameters
    ----------
    weights : np.ndarray, shape=(d,)
        Weight vector.
    bias : float
        Offset.
    classes : tuple
        ``(negative_label, positive_label)``; a positive score predicts
        ``classes[1]``.
    """

    def __init__(self, weights: np.ndarray, bias: float, classes: tuple):
        self.weights = np.array(weights, dtype=np.float64).reshape(-1)
        self.bias = float(bias)
        if len(classes) != 2:
            raise ValidationError(f"LinearSVM needs two classes, got {len(classes)}")
        self.classes = tuple(classes)

    def score(self, x: Union[DataMatrix, np.ndarray]) -> np.ndarray:
        """Signed margin of each row of `x`"""
        x = as_data(x)
        if x.n_cols != self.weights.size:
            raise ValidationError(
                f"LinearSVM expects {self.weights.size} columns, got {x.n_cols}"
            )
        return x.values @ self.weights + self.bias

    def predict(self, x: Union[DataMatrix, np.ndarray]) -> np.ndarray:
        positive = self.score(x) > 0.0
        return np.where(positive, self.classes[1], self.classes[0])

    def __repr__(self):
        return f"LinearSVM(d={self.weights.size}, classes={self.classes})"


def train_linear_svm(
    train: DataMatrix,
    reg: float = 1e-4,
    epochs: int = 50,
    seed: int = 0,
) -> LinearSVM:
    """Fit an L2-regularized hinge-loss linear classifier

    Stochastic subgradient descent on
    ``reg / 2 * ||w||^2 + mean_i max(0, 1 - y_i (x_i . w + b))``, with step
    ``1 / (reg * t)`` at step t. Each epoch visits the training rows once in a seeded
    random order. The bias is learned as the weight of a constant feature and is
    regularized with the weights. The last iterate is returned.

    Parameters
    ----------
    train : DataMatrix
        Training samples with exactly two distinct labels. The larger label (in
        sorted order) is the positive class.
    reg : float = 1e-4
        Regularization strength, > 0.
    epochs : int = 50
        Number of passes over the training set, >= 1.
    seed : int = 0
        Random seed of the visiting order.

    Returns
    -------
    model : LinearSVM
    """
    train = _labeled_training_set(train)
    classes = np.unique(train.labels)
    if classes.size != 2:
        raise ValidationError(
            f"train_linear_svm needs exactly two classes, got {classes.size}"
        )
    reg = float(reg)
    if not (np.isfinite(reg) and reg > 0.0):
        raise ValidationError(f"reg must be a positive real, got {reg}")
    if int(epochs) != epochs or epochs < 1:
        raise ValidationError(f"epochs must be a positive integer, got {epochs}")

    x = np.hstack([train.values, np.ones((train.n_rows, 1))])
    y = np.where(train.labels == classes[1], 1.0, -1.0)
    w = np.zeros(x.shape[1])
    rng = RandomNumberGenerator(RandomNumberEngine(seed))
    t = 0
    for _ in range(int(epochs)):
        for i in rng.permutation(train.n_rows):
            t += 1
            step = 1.0 / (reg * t)
            active = y[i] * (x[i] @ w) < 1.0
            w *= 1.0 - step * reg
            if active:
                w += step * y[i] * x[i]

    logger.debug("train_linear_svm: %d steps, |w|=%.6g", t, np.linalg.norm(w))
    return LinearSVM(w[:-1], w[-1], (classes[0].item(), classes[1].item()))
