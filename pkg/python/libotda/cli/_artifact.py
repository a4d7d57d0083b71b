import json
from typing import Optional, Sequence

from libotda.core import ValidationError
from libotda.featsel import FeatureRanking


class RankingArtifact:
    """Persisted feature ranking and the inputs that produced it

    Parameters
    ----------
    source : str
        Source dataset identifier, usually its path.
    target : str
        Target dataset identifier.
    strategy : str
        Sample selection strategy kind.
    lam : float
        Entropic regularization of the feature plan.
    seed : Optional[int]
        Random seed, or None.
    order : list[int]
        0-based feature indices, most stable first.
    diagonal_scores : list[float]
        Diagonal score per feature, indexed by feature.
    version : str
        Version of the tool that wrote the artifact.
    """

    def __init__(
        self,
        source: str,
        target: str,
        strategy: str,
        lam: float,
        seed: Optional[int],
        order: Sequence[int],
        diagonal_scores: Sequence[float],
        version: str,
    ):
        if len(order) != len(diagonal_scores):
            raise ValidationError(
                f"{len(order)} ranked features but {len(diagonal_scores)} scores"
            )
        self.source = str(source)
        self.target = str(target)
        self.strategy = str(strategy)
        self.lam = float(lam)
        self.seed = None if seed is None else int(seed)
        self.order = [int(i) for i in order]
        self.diagonal_scores = [float(x) for x in diagonal_scores]
        self.version = str(version)

    @staticmethod
    def from_ranking(
        ranking: FeatureRanking,
        source: str,
        target: str,
        strategy: str,
        lam: float,
        seed: Optional[int],
        version: str,
    ) -> "RankingArtifact":
        data = ranking.to_dict()
        return RankingArtifact(
            source=source,
            target=target,
            strategy=strategy,
            lam=lam,
            seed=seed,
            order=data["order"],
            diagonal_scores=data["diagonal_scores"],
            version=version,
        )

    def ranking(self) -> FeatureRanking:
        return FeatureRanking(self.order, self.diagonal_scores)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "strategy": self.strategy,
            "lambda": self.lam,
            "seed": self.seed,
            "order": list(self.order),
            "diagonal_scores": list(self.diagonal_scores),
            "version": self.version,
        }

    @staticmethod
    def from_dict(data: dict) -> "RankingArtifact":
        return RankingArtifact(
            source=data["source"],
            target=data["target"],
            strategy=data["strategy"],
            lam=data["lambda"],
            seed=data["seed"],
            order=data["order"],
            diagonal_scores=data["diagonal_scores"],
            version=data["version"],
        )

    @staticmethod
    def from_json(text: str) -> "RankingArtifact":
        return RankingArtifact.from_dict(json.loads(text))
