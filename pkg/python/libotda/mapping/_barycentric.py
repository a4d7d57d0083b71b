from typing import Optional, Sequence, Union

import numpy as np

from libotda.core import DataMatrix, ValidationError, as_data
from libotda.ot import Coupling


def barycentric_map(
    gamma: Union[Coupling, np.ndarray],
    target: Union[DataMatrix, np.ndarray],
    labels: Optional[Sequence] = None,
) -> DataMatrix:
    """Transport source samples onto the target domain

    Row i of the result is the gamma-weighted average of the target rows,
    ``S_a = diag((gamma 1)^-1) gamma T``. With uniform source weights this is
    ``N_S * gamma * T``.

    Parameters
    ----------
    gamma : Coupling
        Transport plan, shape=(n_source, n_target). Read only.
    target : DataMatrix
        Target samples, shape=(n_target, d).
    labels : Optional[array_like] = None
        Labels to attach to the transported rows, typically the source labels.

    Returns
    -------
    adapted : DataMatrix
        Transported source samples, shape=(n_source, d), with the target's feature
        names.
    """
    g = gamma.values if isinstance(gamma, Coupling) else np.asarray(gamma, float)
    target = as_data(target)
    if g.ndim != 2 or g.shape[1] != target.n_rows:
        raise ValidationError(
            f"barycentric_map: plan shape {g.shape} does not match "
            f"{target.n_rows} target rows"
        )
    mass = g.sum(axis=1)
    if np.any(mass <= 0.0):
        row = int(np.flatnonzero(mass <= 0.0)[0])
        raise ValidationError(
            f"barycentric_map: source row {row} carries no mass, barycenter undefined"
        )
    adapted = (g @ target.values) / mass[:, np.newaxis]
    return DataMatrix(adapted, labels=labels, feature_names=target.feature_names)
