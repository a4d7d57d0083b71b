import logging
import time
from typing import Optional, Sequence

import numpy as np

from libotda.core import (
    DataMatrix,
    RandomNumberEngine,
    RandomNumberGenerator,
    ValidationError,
    as_data,
    squared_euclidean_cost,
    uniform_measure,
)
from libotda.featsel import (
    FeatureRanking,
    balance_source_by_class,
    rank_features,
    select_top_features,
)
from libotda.mapping import barycentric_map
from libotda.ot import solve_class_regularized

from ._classifiers import knn_predict, train_linear_svm
from ._experiment_config import ExperimentConfig
from ._metrics import accuracy, auc

logger = logging.getLogger(__name__)

SCORE_TOLERANCE = 1e-12


class ExperimentResult:
    """Scores and timings of :func:`run_da_experiment`

    Parameters
    ----------
    feature_counts : list[int]
        Evaluated values of d_star.
    per_repetition_scores : array_like, shape=(repetitions, len(feature_counts))
        Accuracy or AUC per repetition and feature count, in [0, 1].
    cell_times : Optional[array_like] = None
        Seconds spent per repetition and feature count on selection, adaptation,
        training and scoring. Zeros if None.
    ranking_times : Optional[array_like] = None
        Seconds spent ranking features in each repetition. Zeros if None.
    """

    def __init__(
        self,
        feature_counts: Sequence[int],
        per_repetition_scores: np.ndarray,
        cell_times: Optional[np.ndarray] = None,
        ranking_times: Optional[np.ndarray] = None,
    ):
        self.feature_counts = [int(x) for x in feature_counts]
        scores = np.array(per_repetition_scores, dtype=np.float64)
        shape = (scores.shape[0] if scores.ndim == 2 else 0, len(self.feature_counts))
        if scores.ndim != 2 or scores.shape != shape or shape[0] == 0:
            raise ValidationError(
                f"per_repetition_scores must have shape (repetitions, "
                f"{len(self.feature_counts)}), got {scores.shape}"
            )
        if np.any(scores < 0.0) or np.any(scores > 1.0):
            raise ValidationError("scores must lie in [0, 1]")
        if cell_times is None:
            cell_times = np.zeros(shape)
        if ranking_times is None:
            ranking_times = np.zeros(shape[0])
        cell_times = np.array(cell_times, dtype=np.float64)
        ranking_times = np.array(ranking_times, dtype=np.float64).reshape(-1)
        if cell_times.shape != shape or ranking_times.shape != (shape[0],):
            raise ValidationError("timing arrays do not match the score matrix")
        self.per_repetition_scores = scores
        self.cell_times = cell_times
        self.ranking_times = ranking_times

    @property
    def repetitions(self) -> int:
        return self.per_repetition_scores.shape[0]

    @property
    def means(self) -> np.ndarray:
        """Mean score per feature count"""
        return self.per_repetition_scores.mean(axis=0)

    @property
    def std_devs(self) -> np.ndarray:
        """Population standard deviation of the scores per feature count"""
        return self.per_repetition_scores.std(axis=0)

    @property
    def wall_times(self) -> np.ndarray:
        """Seconds per feature count, summed over repetitions"""
        return self.cell_times.sum(axis=0)

    def speedup(self) -> np.ndarray:
        """Wall time of the largest feature count divided by each wall time

        Entries whose wall time is 0 are reported as NaN.
        """
        times = self.wall_times
        reference = times[int(np.argmax(self.feature_counts))]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(times > 0.0, reference / times, np.nan)

    def to_dict(self) -> dict:
        return {
            "feature_counts": list(self.feature_counts),
            "per_repetition_scores": self.per_repetition_scores.tolist(),
            "means": self.means.tolist(),
            "std_devs": self.std_devs.tolist(),
            "wall_times": self.wall_times.tolist(),
            "speedup": [None if np.isnan(x) else float(x) for x in self.speedup()],
            "cell_times": self.cell_times.tolist(),
            "ranking_times": self.ranking_times.tolist(),
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentResult":
        return ExperimentResult(
            feature_counts=data["feature_counts"],
            per_repetition_scores=data["per_repetition_scores"],
            cell_times=data.get("cell_times"),
            ranking_times=data.get("ranking_times"),
        )

    def __repr__(self):
        means = ", ".join(f"{x:.4f}" for x in self.means)
        return (
            f"ExperimentResult(feature_counts={self.feature_counts}, "
            f"means=[{means}])"
        )


def _feature_ranking(
    source: DataMatrix,
    target: DataMatrix,
    config: ExperimentConfig,
    repetition: int,
) -> FeatureRanking:
    """Ranking behind the arm's feature order; the random arm gets equal scores"""
    d = source.n_cols
    if config.ordering == "random":
        engine = RandomNumberEngine(config.seed + repetition, 1)
        order = RandomNumberGenerator(engine).permutation(d)
        return FeatureRanking(order, np.full(d, 1.0 / d))
    return rank_features(
        source.without_labels(),
        target,
        strategy=config.strategy.reseeded(repetition),
        lam=config.lam,
        normalization=config.normalization,
    )


def _score_cell(
    source: DataMatrix,
    target: DataMatrix,
    truth: np.ndarray,
    config: ExperimentConfig,
    seed: int,
) -> float:
    """Adapt, train on `source` and score on `target` (features already selected)"""
    train = source
    if config.adaptation == "barycentric_ot3":
        gamma, _ = solve_class_regularized(
            uniform_measure(source.n_rows),
            uniform_measure(target.n_rows),
            squared_euclidean_cost(source, target),
            source.labels,
            lam=config.ot3_lambda,
            eta=config.ot3_eta,
        )
        train = barycentric_map(gamma, target, labels=source.labels)

    if config.classifier == "knn1":
        return accuracy(knn_predict(train, target, k=1), truth)
    model = train_linear_svm(
        train, reg=config.svm_reg, epochs=config.svm_epochs, seed=seed
    )
    if config.metric == "auc":
        return auc(model.score(target), truth, positive=model.classes[1])
    return accuracy(model.predict(target), truth)


def run_da_experiment(
    source: DataMatrix,
    target: DataMatrix,
    config: Optional[ExperimentConfig] = None,
) -> ExperimentResult:
    """Evaluate feature selection for domain adaptation

    For each repetition r, with seed ``config.seed + r``: the labeled source is
    subsampled to `per_class_samples` rows per class, the features are ordered
    against the unlabeled target, and for each d_star the first d_star features of
    the order are kept in both domains, the source is optionally transported onto the
    target, a classifier is trained on the (adapted) source and scored on the full
    target.

    Target labels are only used for scoring; ranking and adaptation receive the
    target without labels.

    Parameters
    ----------
    source : DataMatrix
        Labeled source data.
    target : DataMatrix
        Labeled target data, same features.
    config : Optional[ExperimentConfig] = None
        Protocol parameters. If None, the defaults are used.

    Returns
    -------
    result : ExperimentResult
    """
    source = as_data(source)
    target = as_data(target)
    if config is None:
        config = ExperimentConfig()
    if not source.has_labels():
        raise ValidationError("run_da_experiment: source labels are required")
    if not target.has_labels():
        raise ValidationError("run_da_experiment: target labels are required to score")
    if source.n_cols != target.n_cols:
        raise ValidationError(
            f"source has {source.n_cols} columns but target has {target.n_cols}"
        )
    d = source.n_cols
    feature_counts = config.feature_counts or [d]
    if max(feature_counts) > d:
        raise ValidationError(f"feature counts {feature_counts} exceed d={d}")

    truth = target.labels
    unlabeled_target = target.without_labels()
    n_counts = len(feature_counts)
    scores = np.zeros((config.repetitions, n_counts))
    cell_times = np.zeros((config.repetitions, n_counts))
    ranking_times = np.zeros(config.repetitions)

    for r in range(config.repetitions):
        seed = config.seed + r
        balanced = balance_source_by_class(source, config.per_class_samples, seed)

        start = time.perf_counter()
        ranking = _feature_ranking(balanced, unlabeled_target, config, r)
        ranking_times[r] = time.perf_counter() - start

        for f, d_star in enumerate(feature_counts):
            start = time.perf_counter()
            s_star, t_star = select_top_features(
                balanced,
                unlabeled_target,
                ranking,
                d_star,
                ascending=config.ordering == "ascending",
            )
            scores[r, f] = _score_cell(s_star, t_star, truth, config, seed)
            cell_times[r, f] = time.perf_counter() - start

        logger.info(
            "run_da_experiment: repetition %d/%d, %s scores %s",
            r + 1,
            config.repetitions,
            config.ordering,
            np.array2string(scores[r], precision=4),
        )

    return ExperimentResult(feature_counts, scores, cell_times, ranking_times)
