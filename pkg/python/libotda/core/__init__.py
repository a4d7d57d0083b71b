"""libotda.core: data matrices, empirical measures, costs and randomness"""
from ._data import (
    CostMatrix,
    DataMatrix,
    EmpiricalMeasure,
    as_cost,
    as_data,
    as_measure,
    squared_euclidean_cost,
    uniform_measure,
    zscore,
)
from ._errors import SolverError, ValidationError
from ._random import RandomNumberEngine, RandomNumberGenerator
