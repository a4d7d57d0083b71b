from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from ._errors import ValidationError

ArrayLike = Union[np.ndarray, Sequence]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class DataMatrix:
    """Dense data matrix, rows are instances and columns are features

    Parameters
    ----------
    values : array_like, shape=(n_rows, n_cols)
        Finite real values. A 1d input is read as a single column.
    labels : Optional[array_like] = None
        Optional class identifier per row.
    feature_names : Optional[list[str]] = None
        Optional column names, retained for reporting.
    """

    def __init__(
        self,
        values: ArrayLike,
        labels: Optional[ArrayLike] = None,
        feature_names: Optional[Sequence[str]] = None,
    ):
        values = np.array(values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ValidationError(
                f"DataMatrix values must be 2-dimensional, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            rows, cols = np.nonzero(~np.isfinite(values))
            raise ValidationError(
                "DataMatrix values must be finite: "
                f"first non-finite entry at row {rows[0]}, column {cols[0]}"
            )
        if labels is not None:
            labels = np.array(labels)
            if labels.ndim != 1 or labels.shape[0] != values.shape[0]:
                raise ValidationError(
                    f"labels length {labels.size} does not match "
                    f"{values.shape[0]} rows"
                )
            labels = _frozen(labels)
        if feature_names is not None:
            feature_names = [str(x) for x in feature_names]
            if len(feature_names) != values.shape[1]:
                raise ValidationError(
                    f"{len(feature_names)} feature names for "
                    f"{values.shape[1]} columns"
                )

        self._values = _frozen(values)
        self._labels = labels
        self._feature_names = feature_names

    @property
    def values(self) -> np.ndarray:
        """np.ndarray: Read-only values, shape=(n_rows, n_cols)"""
        return self._values

    @property
    def labels(self) -> Optional[np.ndarray]:
        """Optional[np.ndarray]: Read-only row labels, or None"""
        return self._labels

    @property
    def feature_names(self) -> Optional[list[str]]:
        """Optional[list[str]]: Column names, or None"""
        if self._feature_names is None:
            return None
        return list(self._feature_names)

    @property
    def n_rows(self) -> int:
        return self._values.shape[0]

    @property
    def n_cols(self) -> int:
        return self._values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    def has_labels(self) -> bool:
        return self._labels is not None

    def with_values(self, values: ArrayLike) -> "DataMatrix":
        """Same labels and feature names, new values of the same shape"""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.shape:
            raise ValidationError(
                f"with_values: shape {values.shape} does not match {self.shape}"
            )
        return DataMatrix(
            values, labels=self._labels, feature_names=self._feature_names
        )

    def without_labels(self) -> "DataMatrix":
        return DataMatrix(self._values, feature_names=self._feature_names)

    def take_rows(self, indices: ArrayLike) -> "DataMatrix":
        """Rows at `indices` (repeats allowed), labels carried along"""
        indices = np.asarray(indices, dtype=np.int64)
        labels = None if self._labels is None else self._labels[indices]
        return DataMatrix(
            self._values[indices, :],
            labels=labels,
            feature_names=self._feature_names,
        )

    def take_columns(self, indices: ArrayLike) -> "DataMatrix":
        """Columns at `indices`, in the given order, labels carried along"""
        indices = np.asarray(indices, dtype=np.int64)
        names = None
        if self._feature_names is not None:
            names = [self._feature_names[i] for i in indices]
        return DataMatrix(
            self._values[:, indices],
            labels=self._labels,
            feature_names=names,
        )

    def transpose(self) -> "DataMatrix":
        """Transposed view as a new matrix; labels and names are dropped"""
        return DataMatrix(self._values.T)

    def __repr__(self):
        return (
            f"DataMatrix(n_rows={self.n_rows}, n_cols={self.n_cols}, "
            f"labels={self.has_labels()})"
        )


class EmpiricalMeasure:
    """Probability weights over a finite set of support points

    Parameters
    ----------
    weights : array_like, shape=(n,)
        Non-negative weights summing to 1 within 1e-12.
    """

    sum_tolerance = 1e-12

    def __init__(self, weights: ArrayLike):
        weights = np.array(weights, dtype=np.float64).reshape(-1)
        if weights.size == 0:
            raise ValidationError("EmpiricalMeasure requires at least one weight")
        if not np.all(np.isfinite(weights)):
            raise ValidationError("EmpiricalMeasure weights must be finite")
        if np.any(weights < 0.0):
            raise ValidationError("EmpiricalMeasure weights must be non-negative")
        total = weights.sum()
        if total == 0.0:
            raise ValidationError("EmpiricalMeasure has zero total mass")
        if abs(total - 1.0) > self.sum_tolerance:
            raise ValidationError(
                f"EmpiricalMeasure weights sum to {total!r}, expected 1"
            )
        self._weights = _frozen(weights)

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def n(self) -> int:
        return self._weights.size

    def __len__(self):
        return self._weights.size

    def __repr__(self):
        return f"EmpiricalMeasure(n={self.n})"


def as_measure(x: Union[EmpiricalMeasure, ArrayLike]) -> EmpiricalMeasure:
    if isinstance(x, EmpiricalMeasure):
        return x
    return EmpiricalMeasure(x)


class CostMatrix:
    """Non-negative, finite dissimilarity matrix, shape=(n_source, n_target)"""

    def __init__(self, values: ArrayLike):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValidationError(
                f"CostMatrix must be 2-dimensional, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("CostMatrix entries must be finite")
        if np.any(values < 0.0):
            raise ValidationError("CostMatrix entries must be non-negative")
        self._values = _frozen(values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    def max(self) -> float:
        return float(self._values.max()) if self._values.size else 0.0

    def normalized(self) -> "CostMatrix":
        """Cost divided by its maximum entry (unchanged if the maximum is 0)"""
        m = self.max()
        if m == 0.0:
            return self
        return CostMatrix(self._values / m)

    def __repr__(self):
        return f"CostMatrix(shape={self.shape})"


def as_cost(x: Union[CostMatrix, ArrayLike]) -> CostMatrix:
    if isinstance(x, CostMatrix):
        return x
    return CostMatrix(x)


def as_data(x: Union[DataMatrix, ArrayLike]) -> DataMatrix:
    if isinstance(x, DataMatrix):
        return x
    return DataMatrix(x)


def zscore(m: Union[DataMatrix, ArrayLike]) -> DataMatrix:
    """Standardize each column to mean 0 and population standard deviation 1

    Constant columns are mapped to all-zero columns.

    Parameters
    ----------
    m : DataMatrix
        Input data, at least one row.

    Returns
    -------
    result : DataMatrix
        Standardized data with the same shape, labels and feature names.
    """
    m = as_data(m)
    if m.n_rows == 0:
        raise ValidationError("zscore requires at least one row")
    x = m.values
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = np.ptp(x, axis=0) == 0.0
    std = np.where(constant | (std == 0.0), 1.0, std)
    z = (x - mean) / std
    z[:, constant] = 0.0
    return m.with_values(z)


def squared_euclidean_cost(
    a: Union[DataMatrix, ArrayLike], b: Union[DataMatrix, ArrayLike]
) -> CostMatrix:
    """Pairwise squared Euclidean distances between the rows of `a` and `b`

    Returns
    -------
    cost : CostMatrix
        Entry (i, j) is ``||a_i - b_j||^2``, shape=(a.n_rows, b.n_rows).
    """
    a = as_data(a)
    b = as_data(b)
    if a.n_cols != b.n_cols:
        raise ValidationError(
            f"squared_euclidean_cost: column counts differ ({a.n_cols} != {b.n_cols})"
        )
    return CostMatrix(cdist(a.values, b.values, metric="sqeuclidean"))


def uniform_measure(n: int) -> EmpiricalMeasure:
    """Uniform weights 1/n over n support points"""
    if int(n) != n or n < 1:
        raise ValidationError(f"uniform_measure requires n >= 1, got {n}")
    n = int(n)
    return EmpiricalMeasure(np.full(n, 1.0 / n))
