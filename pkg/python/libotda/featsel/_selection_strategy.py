from typing import Optional

from libotda.core import ValidationError


class SelectionStrategy:
    """How target samples are paired with source samples

    Parameters
    ----------
    kind : str = "exact_ot"
        One of:

        - "exact_ot": row-argmax of the exact transport plan between the z-scored
          source and target
        - "nearest_neighbor": nearest z-scored target row to each z-scored source row
        - "random": target rows drawn uniformly without replacement
    seed : Optional[int] = None
        Random seed, required for "random" and rejected otherwise.
    """

    kinds = ("exact_ot", "nearest_neighbor", "random")

    def __init__(self, kind: str = "exact_ot", seed: Optional[int] = None):
        if kind not in self.kinds:
            raise ValidationError(
                f"unknown selection strategy {kind!r}, expected one of {self.kinds}"
            )
        if kind == "random" and seed is None:
            raise ValidationError("the random selection strategy requires a seed")
        if kind != "random" and seed is not None:
            raise ValidationError(f"the {kind} selection strategy takes no seed")
        self.kind = kind
        self.seed = None if seed is None else int(seed)

    @staticmethod
    def exact_ot() -> "SelectionStrategy":
        return SelectionStrategy("exact_ot")

    @staticmethod
    def nearest_neighbor() -> "SelectionStrategy":
        return SelectionStrategy("nearest_neighbor")

    @staticmethod
    def random(seed: int) -> "SelectionStrategy":
        return SelectionStrategy("random", seed=seed)

    def reseeded(self, offset: int) -> "SelectionStrategy":
        """Same strategy; a random strategy gets seed ``seed + offset``"""
        if self.kind != "random":
            return self
        return SelectionStrategy("random", seed=self.seed + int(offset))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed}

    @staticmethod
    def from_dict(data: dict) -> "SelectionStrategy":
        return SelectionStrategy(data["kind"], seed=data.get("seed"))

    def __eq__(self, other):
        if not isinstance(other, SelectionStrategy):
            return NotImplemented
        return self.kind == other.kind and self.seed == other.seed

    def __repr__(self):
        if self.seed is None:
            return f"SelectionStrategy({self.kind!r})"
        return f"SelectionStrategy({self.kind!r}, seed={self.seed})"
