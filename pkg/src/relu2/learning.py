"""Sample-complexity and generalization bounds, and a proper learner built on the exact trainer.

All logarithms are natural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .core import NORM_SLACK, Dataset, ReluNetwork
from .trainer import TrainOptions, train_exact


@dataclass(frozen=True)
class LearnParams:
    k: int
    epsilon: float
    delta: float
    C_smooth: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not self.C_smooth >= 1:
            raise ValueError("C_smooth must be at least 1")


def sample_complexity_agnostic(p: LearnParams) -> int:
    """ceil(1024 k^4 (1 + ln(1/delta)) / epsilon^2)."""
    return math.ceil(1024 * p.k ** 4 * (1 + math.log(1 / p.delta)) / p.epsilon ** 2)


def sample_complexity_realizable(p: LearnParams) -> int:
    """ceil(1e6 C k^2 ln^3(10 C k / epsilon) / epsilon + 8 k^2 ln(1/delta) / epsilon)."""
    C, k, eps = p.C_smooth, p.k, p.epsilon
    return math.ceil(1e6 * C * k ** 2 * math.log(10 * C * k / eps) ** 3 / eps
                     + 8 * k ** 2 * math.log(1 / p.delta) / eps)


def rademacher_bound(k: int, m: int) -> float:
    if m < 1:
        raise ValueError("m must be at least 1")
    return 2 * k / math.sqrt(m)


def generalization_gap_bound(k: int, m: int, delta: float) -> float:
    """4 L R_m + 2 b sqrt(ln(1/delta)/m) with Lipschitz constant L = 2k and loss bound b = 4k^2."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return 4 * (2 * k) * rademacher_bound(k, m) + 2 * (4 * k ** 2) * math.sqrt(math.log(1 / delta) / m)


@dataclass(frozen=True)
class LearnResult:
    network: ReluNetwork
    requested_m: int
    used_m: int
    capped: bool
    training_loss: float
    status: str

    def to_dict(self) -> dict:
        return {"network": self.network.to_dict(), "requested_m": self.requested_m, "used_m": self.used_m,
                "capped": self.capped, "training_loss": self.training_loss, "status": self.status}


def learn(sample_source: Callable[[np.random.Generator], tuple], p: LearnParams, realizable: bool = False,
          opts: TrainOptions | None = None, seed: int = 0, max_samples: int | None = None) -> LearnResult:
    """Draw samples and return the exact empirical risk minimizer over bounded k-ReLU networks.

    ``sample_source(rng)`` returns one labelled draw ``(x, y)``.  The number
    of draws follows the matching complexity formula but is capped so the
    collapsed problem fits the trainer's enumeration budget; a capped run
    warns and reports status "capped" because the guarantee then no longer
    applies.
    """
    opts = opts or TrainOptions(bounded=True)
    if not opts.bounded:
        opts = replace(opts, bounded=True)
    requested = sample_complexity_realizable(p) if realizable else sample_complexity_agnostic(p)
    cap = max_samples if max_samples is not None else max(1, opts.enum_cap // p.k)
    used = min(requested, cap)
    capped = used < requested
    if capped:
        warnings.warn(f"complexity formula asks for {requested} samples; using {used} to fit the "
                      f"trainer budget, so the accuracy guarantee does not apply", RuntimeWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for i in range(used):
        x, y = sample_source(rng)
        x = np.asarray(x, dtype=float).reshape(-1)
        if np.linalg.norm(x) > 1 + NORM_SLACK:
            raise ValueError(f"draw {i} has ||x|| = {np.linalg.norm(x):.6g} > 1")
        if abs(y) > p.k * (1 + NORM_SLACK):
            raise ValueError(f"draw {i} has |y| = {abs(y):.6g} > k = {p.k}")
        xs.append(x)
        ys.append(float(y))
    data = Dataset(np.vstack(xs), ys, bounded=True, meta={"seed": seed})
    res = train_exact(data, p.k, opts)
    return LearnResult(res.network, requested, used, capped, res.loss, "capped" if capped else "ok")
