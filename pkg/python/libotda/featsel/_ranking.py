import logging
from typing import Optional, Union

import numpy as np

from libotda.core import (
    DataMatrix,
    ValidationError,
    as_data,
    squared_euclidean_cost,
    uniform_measure,
    zscore,
)
from libotda.ot import Coupling, SinkhornParams, SolverReport, solve_entropic

from ._selection import select_target_samples
from ._selection_strategy import SelectionStrategy

logger = logging.getLogger(__name__)

SCORE_TOLERANCE = 1e-9


class FeatureRanking:
    """Features ordered from least to most shifted between domains

    Parameters
    ----------
    order : array_like[int], shape=(d,)
        A permutation of ``range(d)``; ``order[0]`` is the most stable feature.
    diagonal_scores : array_like[float], shape=(d,)
        Score of feature i, in ``[0, 1/d]``: the mass of feature-plan row i that is
        transported to feature i itself. ``diagonal_scores[order]`` is
        non-increasing.
    coupling : Optional[Coupling] = None
        The d x d feature transport plan the ranking was read from.
    report : Optional[SolverReport] = None
        Convergence record of the feature plan.
    """

    def __init__(
        self,
        order: np.ndarray,
        diagonal_scores: np.ndarray,
        coupling: Optional[Coupling] = None,
        report: Optional[SolverReport] = None,
    ):
        order = np.array(order, dtype=np.int64).reshape(-1)
        scores = np.array(diagonal_scores, dtype=np.float64).reshape(-1)
        d = order.size
        if d == 0:
            raise ValidationError("FeatureRanking requires at least one feature")
        if scores.size != d:
            raise ValidationError(f"{scores.size} scores for {d} ranked features")
        if not np.array_equal(np.sort(order), np.arange(d)):
            raise ValidationError("FeatureRanking order is not a permutation")
        if np.any(scores < 0.0) or np.any(scores > 1.0 / d + SCORE_TOLERANCE):
            raise ValidationError(f"diagonal scores must lie in [0, 1/{d}]")
        if np.any(np.diff(scores[order]) > SCORE_TOLERANCE):
            raise ValidationError("diagonal scores are not non-increasing in order")
        order.setflags(write=False)
        scores.setflags(write=False)
        self.order = order
        self.diagonal_scores = scores
        self.coupling = coupling
        self.report = report

    @staticmethod
    def from_coupling(
        gamma: Coupling, report: Optional[SolverReport] = None
    ) -> "FeatureRanking":
        """Rank features by how little of their mass leaves the diagonal

        Each row is read relative to its own sum, so a plan whose rows miss the
        marginal by a small factor ranks the same as the exact plan. The score of
        feature i is ``w_i * gamma[i, i] / rowsum_i``. The off-diagonal share is
        summed directly, so features whose diagonal entries all round to ``1/d``
        remain distinguishable. Features are sorted by decreasing score, then by
        increasing off-diagonal share, then by index.
        """
        g = gamma.values
        d = g.shape[0]
        if g.shape != (d, d):
            raise ValidationError(f"feature plan must be square, got shape {g.shape}")
        off_diagonal = g.copy()
        np.fill_diagonal(off_diagonal, 0.0)
        row_sums = g.sum(axis=1)
        if np.any(row_sums <= 0.0):
            raise ValidationError("feature plan has an empty row")
        leakage = off_diagonal.sum(axis=1) / row_sums
        weights = gamma.row_marginal.weights
        scores = np.clip(weights * (1.0 - leakage), 0.0, 1.0 / d)
        order = np.lexsort((np.arange(d), leakage, -scores))
        return FeatureRanking(order, scores, coupling=gamma, report=report)

    @property
    def n_features(self) -> int:
        return self.order.size

    def ascending_order(self) -> np.ndarray:
        """Features from most to least shifted"""
        return self.order[::-1].copy()

    def to_dict(self) -> dict:
        return {
            "order": [int(i) for i in self.order],
            "diagonal_scores": [float(x) for x in self.diagonal_scores],
        }

    @staticmethod
    def from_dict(data: dict) -> "FeatureRanking":
        return FeatureRanking(data["order"], data["diagonal_scores"])

    def __repr__(self):
        return f"FeatureRanking(order={self.order.tolist()})"


def _feature_points(s: DataMatrix, t_u: DataMatrix, normalization: str):
    if normalization == "sample":
        return zscore(s.transpose()), zscore(t_u.transpose())
    elif normalization == "feature":
        return zscore(s).transpose(), zscore(t_u).transpose()
    raise ValidationError(
        f"unknown normalization {normalization!r}, expected 'sample' or 'feature'"
    )


def rank_features(
    s: Union[DataMatrix, np.ndarray],
    t: Union[DataMatrix, np.ndarray],
    strategy: Optional[SelectionStrategy] = None,
    lam: float = 1.0,
    normalization: str = "sample",
    normalize_cost: bool = False,
    params: Optional[SinkhornParams] = None,
) -> FeatureRanking:
    """Rank features by how well each one keeps its identity across domains

    The smaller sample set plays the source role. One target sample is selected
    per source sample (see :func:`select_target_samples`), both sample sets are
    transposed so that each feature becomes a point with one coordinate per
    paired sample, and an entropic plan between the d source features and the d
    target features is solved with uniform weights. A feature whose plan row
    stays on the diagonal has a similar distribution in both domains.

    Parameters
    ----------
    s : DataMatrix
        Source samples, shape=(n_source, d).
    t : DataMatrix
        Target samples, shape=(n_target, d). Labels, if any, are ignored.
    strategy : Optional[SelectionStrategy] = None
        Sample pairing rule; exact OT selection if None.
    lam : float = 1.0
        Entropic regularization strength of the feature plan.
    normalization : str = "sample"
        "sample" z-scores each paired sample across features (each column of the
        transposed data); "feature" z-scores each feature across samples before
        transposing.
    normalize_cost : bool = False
        If True, divide the feature cost by its maximum entry before solving.
    params : Optional[SinkhornParams] = None
        Options of the feature plan solve.

    Returns
    -------
    ranking : FeatureRanking
        Order, diagonal scores, the d x d plan and its solver report.
    """
    s = as_data(s)
    t = as_data(t)
    if s.n_cols != t.n_cols:
        raise ValidationError(
            f"source has {s.n_cols} columns but target has {t.n_cols}"
        )
    if s.n_cols == 0:
        raise ValidationError("rank_features requires at least one feature")
    if strategy is None:
        strategy = SelectionStrategy.exact_ot()
    if params is None:
        params = SinkhornParams()
    if normalize_cost:
        params = params.copy(normalize_cost=True)

    if s.n_rows > t.n_rows:
        logger.debug(
            "rank_features: %d source rows > %d target rows, exchanging roles",
            s.n_rows,
            t.n_rows,
        )
        s, t = t, s

    t_u = select_target_samples(s, t, strategy)
    fs, ft = _feature_points(s, t_u, normalization)
    d = s.n_cols
    cost = squared_euclidean_cost(fs, ft)
    gamma, report = solve_entropic(
        uniform_measure(d), uniform_measure(d), cost, lam, params
    )
    ranking = FeatureRanking.from_coupling(gamma, report)
    logger.info(
        "rank_features: d=%d, n=%d, strategy=%s, iterations=%d",
        d,
        s.n_rows,
        strategy.kind,
        report.iterations,
    )
    return ranking


def select_top_features(
    s: Union[DataMatrix, np.ndarray],
    t: Union[DataMatrix, np.ndarray],
    ranking: FeatureRanking,
    d_star: int,
    ascending: bool = False,
) -> tuple[DataMatrix, DataMatrix]:
    """Restrict both domains to the first `d_star` ranked features

    Parameters
    ----------
    s, t : DataMatrix
        Source and target samples, d columns each.
    ranking : FeatureRanking
        Ranking of the d features.
    d_star : int
        Number of features to keep, ``1 <= d_star <= d``.
    ascending : bool = False
        If True, keep the `d_star` most shifted features instead.

    Returns
    -------
    s_star, t_star : DataMatrix
        Columns in ranking order; labels and feature names are carried along.
    """
    s = as_data(s)
    t = as_data(t)
    d = ranking.n_features
    if s.n_cols != d or t.n_cols != d:
        raise ValidationError(
            f"ranking covers {d} features but data have {s.n_cols} and {t.n_cols}"
        )
    if int(d_star) != d_star or not 1 <= d_star <= d:
        raise ValidationError(f"d_star must be an integer in [1, {d}], got {d_star}")
    order = ranking.ascending_order() if ascending else ranking.order
    columns = order[: int(d_star)]
    return s.take_columns(columns), t.take_columns(columns)
