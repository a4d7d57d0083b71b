import numpy as np

from libotda.core import (
    DataMatrix,
    RandomNumberEngine,
    RandomNumberGenerator,
    ValidationError,
)

SHIFT_MODES = ("shuffle", "perturb")


def _check_count(name: str, value: int, minimum: int) -> int:
    if int(value) != value or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


def generate_shifted_dataset(
    n_s: int,
    n_t: int,
    d: int,
    k_shifted: int,
    n_classes: int = 2,
    seed: int = 0,
    mode: str = "shuffle",
    class_separation: float = 1.5,
    shift_scale: float = 2.0,
    mean_shift: float = 3.0,
) -> tuple[DataMatrix, DataMatrix, np.ndarray]:
    """Labeled source and target data that differ only in planted features

    Each class has a Gaussian mean drawn from ``N(0, class_separation^2)`` per feature
    (centered across classes), with unit-variance noise. Source and target rows are
    drawn from the same class-conditional distributions; afterwards the target
    versions of `k_shifted` randomly chosen features are shifted:

    - "shuffle": the column is independently permuted across target rows, which
      breaks its link to the class, then multiplied by `shift_scale`
    - "perturb": the column is mapped to ``shift_scale * x + mean_shift``

    Labels are balanced: row i has class ``i % n_classes``.

    Parameters
    ----------
    n_s, n_t : int
        Number of source and target rows, each >= n_classes.
    d : int
        Number of features, >= 1.
    k_shifted : int
        Number of shifted features, ``0 <= k_shifted <= d``.
    n_classes : int = 2
        Number of classes, >= 1.
    seed : int = 0
        Random seed.
    mode : str = "shuffle"
        Shift applied to the planted target features.
    class_separation : float = 1.5
        Standard deviation of the class means.
    shift_scale : float = 2.0
        Scale factor of the shifted target features.
    mean_shift : float = 3.0
        Offset added to the shifted target features in "perturb" mode.

    Returns
    -------
    source : DataMatrix
        Labeled source data, shape=(n_s, d), features named "f0", "f1", ...
    target : DataMatrix
        Labeled target data, shape=(n_t, d).
    planted : np.ndarray[int]
        Sorted indices of the shifted features.
    """
    n_classes = _check_count("n_classes", n_classes, 1)
    n_s = _check_count("n_s", n_s, n_classes)
    n_t = _check_count("n_t", n_t, n_classes)
    d = _check_count("d", d, 1)
    k_shifted = _check_count("k_shifted", k_shifted, 0)
    if k_shifted > d:
        raise ValidationError(f"k_shifted={k_shifted} exceeds d={d}")
    if mode not in SHIFT_MODES:
        raise ValidationError(f"unknown shift mode {mode!r}, expected {SHIFT_MODES}")

    rng = RandomNumberGenerator(RandomNumberEngine(seed))
    means = rng.normal(0.0, class_separation, (n_classes, d))
    means -= means.mean(axis=0)

    source_labels = np.arange(n_s) % n_classes
    target_labels = np.arange(n_t) % n_classes
    source = means[source_labels] + rng.normal(0.0, 1.0, (n_s, d))
    target = means[target_labels] + rng.normal(0.0, 1.0, (n_t, d))

    planted = np.sort(rng.choice(d, k_shifted, replace=False)).astype(np.int64)
    for j in planted:
        if mode == "shuffle":
            target[:, j] = shift_scale * target[rng.permutation(n_t), j]
        else:
            target[:, j] = shift_scale * target[:, j] + mean_shift

    names = [f"f{j}" for j in range(d)]
    return (
        DataMatrix(source, labels=source_labels, feature_names=names),
        DataMatrix(target, labels=target_labels, feature_names=names),
        planted,
    )
