import logging
from typing import Union

import numpy as np

from libotda.core import (
    DataMatrix,
    RandomNumberEngine,
    RandomNumberGenerator,
    ValidationError,
    as_data,
    squared_euclidean_cost,
    uniform_measure,
    zscore,
)
from libotda.ot import solve_exact

from ._selection_strategy import SelectionStrategy

logger = logging.getLogger(__name__)


def _check_pair(s: DataMatrix, t: DataMatrix):
    if s.n_rows == 0 or t.n_rows == 0:
        raise ValidationError("source and target must both have at least one row")
    if s.n_cols != t.n_cols:
        raise ValidationError(
            f"source has {s.n_cols} columns but target has {t.n_cols}"
        )


def select_target_indices(
    s: Union[DataMatrix, np.ndarray],
    t: Union[DataMatrix, np.ndarray],
    strategy: SelectionStrategy,
) -> np.ndarray:
    """Index of the target row paired with each source row

    See :func:`select_target_samples`.

    Returns
    -------
    indices : np.ndarray[int], shape=(s.n_rows,)
        Target row indices; repeats are possible except for the random strategy.
    """
    s = as_data(s)
    t = as_data(t)
    _check_pair(s, t)

    if strategy.kind == "exact_ot":
        if s.n_rows > t.n_rows:
            raise ValidationError(
                f"exact_ot selection needs n_source <= n_target, got "
                f"{s.n_rows} > {t.n_rows}; exchange the roles of source and target"
            )
        cost = squared_euclidean_cost(zscore(s), zscore(t))
        gamma = solve_exact(uniform_measure(s.n_rows), uniform_measure(t.n_rows), cost)
        # np.argmax returns the lowest index among tied maxima
        indices = np.argmax(gamma.values, axis=1)
    elif strategy.kind == "nearest_neighbor":
        cost = squared_euclidean_cost(zscore(s), zscore(t))
        indices = np.argmin(cost.values, axis=1)
    else:
        if s.n_rows > t.n_rows:
            raise ValidationError(
                f"random selection without replacement needs n_source <= n_target, "
                f"got {s.n_rows} > {t.n_rows}"
            )
        rng = RandomNumberGenerator(RandomNumberEngine(strategy.seed))
        indices = rng.choice(t.n_rows, s.n_rows, replace=False)

    logger.debug(
        "select_target_indices: %s, %d distinct of %d target rows",
        strategy,
        np.unique(indices).size,
        t.n_rows,
    )
    return np.asarray(indices, dtype=np.int64)


def select_target_samples(
    s: Union[DataMatrix, np.ndarray],
    t: Union[DataMatrix, np.ndarray],
    strategy: SelectionStrategy,
) -> DataMatrix:
    """Pick one target sample per source sample

    Parameters
    ----------
    s : DataMatrix
        Source samples, shape=(n_source, d).
    t : DataMatrix
        Target samples, shape=(n_target, d). For the "exact_ot" and "random"
        strategies ``n_source <= n_target`` is required.
    strategy : SelectionStrategy
        Pairing rule. With "exact_ot", both inputs are z-scored, the exact plan with
        uniform weights is solved and source row i is paired with the target row
        holding the largest mass of plan row i (lowest index on ties).

    Returns
    -------
    t_u : DataMatrix
        Copies of target rows, one per source row, in source order. The same target
        row may appear more than once.
    """
    t = as_data(t)
    return t.take_rows(select_target_indices(s, t, strategy))


def balance_source_by_class(
    s: DataMatrix,
    per_class: int,
    seed: int,
) -> DataMatrix:
    """Subsample at most `per_class` rows of each class

    Rows are drawn uniformly without replacement within each class; classes with
    fewer rows are kept whole. Selected rows keep their original relative order.

    Parameters
    ----------
    s : DataMatrix
        Labeled source samples.
    per_class : int
        Maximum number of rows per class, >= 1.
    seed : int
        Random seed.

    Returns
    -------
    balanced : DataMatrix
        The selected rows, with labels.
    """
    s = as_data(s)
    if not s.has_labels():
        raise ValidationError("balance_source_by_class requires labeled source data")
    if int(per_class) != per_class or per_class < 1:
        raise ValidationError(f"per_class must be a positive integer, got {per_class}")
    per_class = int(per_class)

    rng = RandomNumberGenerator(RandomNumberEngine(seed))
    chosen = []
    for label in np.unique(s.labels):
        rows = np.flatnonzero(s.labels == label)
        if rows.size > per_class:
            rows = rows[rng.choice(rows.size, per_class, replace=False)]
        chosen.append(rows)
    return s.take_rows(np.sort(np.concatenate(chosen)))
