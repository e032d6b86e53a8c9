"""Brute-force grid oracle, used only to cross-check the exact trainer."""

from __future__ import annotations

import numpy as np

from ..core import Dataset, ReluNetwork, eval_loss
from .baselines import grid_search
from .exact import EnumerationCapExceeded, SignPattern, TrainResult

ORACLE_CAP = 100_000_000


def oracle_grid(dim: int, grid_step: float, box_radius: float, ball: bool) -> np.ndarray:
    """All points of the step-``grid_step`` lattice in [-R, R]^dim, optionally cut to the unit ball."""
    if grid_step <= 0 or box_radius <= 0:
        raise ValueError("grid step and box radius must be positive")
    half = int(np.floor(box_radius / grid_step + 1e-9))
    axis = grid_step * np.arange(-half, half + 1)
    P = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    if ball:
        P = P[np.linalg.norm(P, axis=1) <= 1.0 + 1e-12]
    return P


def brute_force_oracle(data: Dataset, k: int, grid_step: float, box_radius: float,
                       fixed_coeffs=None, bounded: bool | None = None,
                       cap: int = ORACLE_CAP) -> TrainResult:
    """Exhaustive minimum over grid-valued unit weights and all coefficient vectors.

    With ``bounded`` (default: the dataset's flag) the grid is restricted to
    the unit ball, so the result is an upper bound on the ball-constrained
    optimum.
    """
    bounded = data.bounded if bounded is None else bounded
    per_axis = 2 * int(np.floor(box_radius / grid_step + 1e-9)) + 1
    n_coeffs = 1 if fixed_coeffs is not None else 2 ** k
    budget = per_axis ** (k * data.dim) * n_coeffs
    if budget > cap:
        raise EnumerationCapExceeded(int(np.ceil(np.log2(budget))), int(np.log2(cap)), budget)
    P = oracle_grid(data.dim, grid_step, box_radius, bounded)
    loss, idx, a = grid_search(data, k, P, fixed_coeffs, cap)
    net = ReluNetwork(P[list(idx)], a)
    bits = (np.asarray(data.X @ net.unit_weights.T) >= 0).astype(np.uint8)
    return TrainResult(net, eval_loss(net, data), SignPattern(bits), a, loss, n_coeffs * P.shape[0] ** k)


def oracle_resolution_bound(data: Dataset, k: int, grid_step: float, oracle_loss: float) -> float:
    """How far the grid minimum can sit above the true optimum.

    Every weight vector of norm at most one (or inside the box, less than
    one step from its edge) has a grid point within h sqrt(n) that is also
    admissible, so each output moves by at most D_i = k h sqrt(n) ||x_i||.
    Expanding the square, loss(grid) - opt <= mean(D^2) + 2 sqrt(mean(D^2) opt)
    with opt <= oracle_loss.
    """
    D = k * grid_step * np.sqrt(data.dim) * data.row_norms()
    mean_sq = float(data.weights @ D ** 2 / data.total_weight)
    return mean_sq + 2.0 * np.sqrt(mean_sq * max(oracle_loss, 0.0))
