"""Exact and baseline trainers for depth-2 ReLU networks."""

from .exact import (
    EnumerationCapExceeded,
    SignPattern,
    TrainOptions,
    TrainResult,
    arrangement_cells,
    collapse_samples,
    train_exact,
)
from .baselines import NotRealizable, train_epsnet, train_realizable_1relu
from .oracle import brute_force_oracle, oracle_resolution_bound

__all__ = [
    "EnumerationCapExceeded",
    "NotRealizable",
    "SignPattern",
    "TrainOptions",
    "TrainResult",
    "arrangement_cells",
    "brute_force_oracle",
    "collapse_samples",
    "oracle_resolution_bound",
    "train_epsnet",
    "train_exact",
    "train_realizable_1relu",
]
