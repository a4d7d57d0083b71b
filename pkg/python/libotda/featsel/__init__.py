"""libotda.featsel: transport-based ranking of domain-invariant features"""
from ._ranking import FeatureRanking, rank_features, select_top_features
from ._selection import (
    balance_source_by_class,
    select_target_indices,
    select_target_samples,
)
from ._selection_strategy import SelectionStrategy
