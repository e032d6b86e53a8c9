"""Exact training of depth-2 ReLU networks and generators for their hard instances."""

from .core import (Dataset, ReluNetwork, Tolerances, Violation, WeightedSample, check_bounded, eval_loss,
                   eval_network, normalize_coefficients, pad_dimensions, pad_network)
from .learning import (LearnParams, LearnResult, generalization_gap_bound, learn, rademacher_bound,
                       sample_complexity_agnostic, sample_complexity_realizable)
from .solver import ClsProblem, SolveOutcome, solve_cls, solve_linear_feasibility
from .trainer import (EnumerationCapExceeded, NotRealizable, SignPattern, TrainOptions, TrainResult,
                      brute_force_oracle, train_epsnet, train_exact, train_realizable_1relu)
from .verify import VerifyReport, check_soundness_gap, check_witness, roundtrip_setcover

__version__ = "0.1.0"

__all__ = [
    "ClsProblem", "Dataset", "EnumerationCapExceeded", "LearnParams", "LearnResult", "NotRealizable",
    "ReluNetwork", "SignPattern", "SolveOutcome", "Tolerances", "TrainOptions", "TrainResult", "VerifyReport",
    "Violation", "WeightedSample", "brute_force_oracle", "check_bounded", "check_soundness_gap",
    "check_witness", "eval_loss", "eval_network", "generalization_gap_bound", "learn",
    "normalize_coefficients", "pad_dimensions", "pad_network", "rademacher_bound", "roundtrip_setcover",
    "sample_complexity_agnostic", "sample_complexity_realizable", "solve_cls", "solve_linear_feasibility",
    "train_epsnet", "train_exact", "train_realizable_1relu",
]
