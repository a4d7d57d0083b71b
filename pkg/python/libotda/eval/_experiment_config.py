from typing import Optional, Sequence

import numpy as np

from libotda.core import ValidationError
from libotda.featsel import SelectionStrategy


def fraction_feature_counts(
    d: int, fractions: Sequence[float] = (1.0 / 32, 1.0 / 8, 1.0 / 2, 1.0)
) -> list[int]:
    """Feature counts ``max(1, floor(d * f))``, sorted and deduplicated

    The default ladder is d/32, d/8, d/2 and d.
    """
    if int(d) != d or d < 1:
        raise ValidationError(f"d must be a positive integer, got {d}")
    counts = set()
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ValidationError(f"feature fractions must lie in (0, 1], got {f}")
        counts.add(max(1, int(np.floor(d * f))))
    return sorted(counts)


class ExperimentConfig:
    """Parameters of a feature-selection domain adaptation experiment

    Parameters
    ----------
    repetitions : int = 19
        Number of repetitions, each with its own class-balanced source subsample.
        Repetition r uses the seed ``seed + r``.
    per_class_samples : int = 20
        Source rows drawn per class in each repetition.
    feature_counts : Optional[list[int]] = None
        Values of d_star to evaluate, each in [1, d]. If None, only d is used.
    strategy : Optional[SelectionStrategy] = None
        Target sample selection used by the ranking. If None, exact OT. A random
        strategy is reseeded per repetition.
    lam : float = 1.0
        Entropic regularization of the feature plan.
    adaptation : str = "none"
        "none" trains on the selected source features; "barycentric_ot3" first
        transports the source onto the target with the class-regularized plan.
    classifier : str = "knn1"
        "knn1" (1-nearest neighbor) or "linear_svm".
    metric : str = "accuracy"
        "accuracy", or "auc" (binary tasks with "linear_svm" only).
    seed : int = 0
        Base random seed.
    ordering : str = "descending"
        Which features are kept: "descending" takes the best-ranked ones,
        "ascending" the worst-ranked ones and "random" a seeded random order
        without ranking.
    ot3_lambda : float = 2.0
        Entropic regularization of the adaptation plan.
    ot3_eta : float = 1.0
        Class regularization weight of the adaptation plan.
    normalization : str = "sample"
        Normalization of the ranking, see :func:`~libotda.featsel.rank_features`.
    svm_reg : float = 1e-4
        Regularization of the linear SVM.
    svm_epochs : int = 50
        Training epochs of the linear SVM.
    """

    adaptations = ("none", "barycentric_ot3")
    classifiers = ("knn1", "linear_svm")
    metrics = ("accuracy", "auc")
    orderings = ("descending", "ascending", "random")
    normalizations = ("sample", "feature")

    def __init__(
        self,
        repetitions: int = 19,
        per_class_samples: int = 20,
        feature_counts: Optional[list[int]] = None,
        strategy: Optional[SelectionStrategy] = None,
        lam: float = 1.0,
        adaptation: str = "none",
        classifier: str = "knn1",
        metric: str = "accuracy",
        seed: int = 0,
        ordering: str = "descending",
        ot3_lambda: float = 2.0,
        ot3_eta: float = 1.0,
        normalization: str = "sample",
        svm_reg: float = 1e-4,
        svm_epochs: int = 50,
    ):
        if int(repetitions) != repetitions or repetitions < 1:
            raise ValidationError(f"repetitions must be >= 1, got {repetitions}")
        if int(per_class_samples) != per_class_samples or per_class_samples < 1:
            raise ValidationError(
                f"per_class_samples must be >= 1, got {per_class_samples}"
            )
        if feature_counts is not None:
            feature_counts = [int(x) for x in feature_counts]
            if len(feature_counts) == 0 or min(feature_counts) < 1:
                raise ValidationError(
                    f"feature_counts must be positive integers, got {feature_counts}"
                )
        for name, value, allowed in [
            ("adaptation", adaptation, self.adaptations),
            ("classifier", classifier, self.classifiers),
            ("metric", metric, self.metrics),
            ("ordering", ordering, self.orderings),
            ("normalization", normalization, self.normalizations),
        ]:
            if value not in allowed:
                raise ValidationError(f"unknown {name} {value!r}, expected {allowed}")
        if metric == "auc" and classifier != "linear_svm":
            raise ValidationError("the auc metric requires the linear_svm classifier")

        self.repetitions = int(repetitions)
        self.per_class_samples = int(per_class_samples)
        self.feature_counts = feature_counts
        self.strategy = strategy if strategy is not None else SelectionStrategy()
        self.lam = float(lam)
        self.adaptation = adaptation
        self.classifier = classifier
        self.metric = metric
        self.seed = int(seed)
        self.ordering = ordering
        self.ot3_lambda = float(ot3_lambda)
        self.ot3_eta = float(ot3_eta)
        self.normalization = normalization
        self.svm_reg = float(svm_reg)
        self.svm_epochs = int(svm_epochs)

    def copy(self, **kwargs) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(kwargs)
        return ExperimentConfig.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "per_class_samples": self.per_class_samples,
            "feature_counts": (
                None if self.feature_counts is None else list(self.feature_counts)
            ),
            "strategy": self.strategy.to_dict(),
            "lam": self.lam,
            "adaptation": self.adaptation,
            "classifier": self.classifier,
            "metric": self.metric,
            "seed": self.seed,
            "ordering": self.ordering,
            "ot3_lambda": self.ot3_lambda,
            "ot3_eta": self.ot3_eta,
            "normalization": self.normalization,
            "svm_reg": self.svm_reg,
            "svm_epochs": self.svm_epochs,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        data = dict(data)
        strategy = data.pop("strategy", None)
        if isinstance(strategy, dict):
            strategy = SelectionStrategy.from_dict(strategy)
        return ExperimentConfig(strategy=strategy, **data)
