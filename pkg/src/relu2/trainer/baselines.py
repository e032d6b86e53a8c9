"""Baselines: the realizable single-unit LP and epsilon-net enumeration."""

from __future__ import annotations

import itertools

import numpy as np

from ..core import Dataset, ReluNetwork, eval_loss, relu
from ..solver import solve_linear_feasibility
from .exact import EnumerationCapExceeded, SignPattern, TrainResult

EPSNET_CAP = 20_000_000


class NotRealizable(Exception):
    """No single ReLU of either coefficient sign fits the data exactly."""


def train_realizable_1relu(data: Dataset, tol: float = 1e-9) -> ReluNetwork:
    """Fit one ReLU with zero loss by linear programming, trying a = +1 then a = -1.

    For a = +1 every positive label pins <w, x_i> = y_i and every zero
    label asks <w, x_i> <= 0; a negative label rules this orientation out.
    The a = -1 case is the same system on negated labels.
    """
    X = data.dense_X()
    for a in (1.0, -1.0):
        y = a * data.y
        if np.any(y < 0):
            continue
        eqs = [(X[i], y[i]) for i in range(data.m) if y[i] > 0]
        ineqs = [(X[i], "<=") for i in range(data.m) if y[i] == 0]
        res = solve_linear_feasibility(eqs, ineqs, dim=data.dim)
        if not res.feasible:
            continue
        net = ReluNetwork(res.point[None, :], [a])
        if eval_loss(net, data) <= tol:
            return net
    raise NotRealizable("no single ReLU with coefficient +1 or -1 fits every sample exactly")


def epsnet_points(dim: int, net_spacing: float, seed: int = 0) -> np.ndarray:
    """A net of the unit ball: every point of the ball is within ``net_spacing`` of some row.

    A cubic grid of side h = 2 delta / sqrt(dim) has covering radius delta;
    the grid is shifted by a seeded random offset and its points are
    projected onto the ball, which cannot increase distances to ball points.
    """
    if net_spacing <= 0:
        raise ValueError("net spacing must be positive")
    if net_spacing >= 1.0:
        return np.zeros((1, dim))
    h = 2.0 * net_spacing / np.sqrt(dim)
    shift = np.random.default_rng(seed).uniform(0.0, h, size=dim)
    axes = []
    for c in range(dim):
        lo = np.floor((-1.0 - h - shift[c]) / h)
        hi = np.ceil((1.0 + h - shift[c]) / h)
        axes.append(shift[c] + h * np.arange(lo, hi + 1))
    size = int(np.prod([len(ax) for ax in axes]))
    if size > EPSNET_CAP:
        raise EnumerationCapExceeded(int(np.ceil(np.log2(size))), int(np.log2(EPSNET_CAP)), size)
    P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    # drop points whose projection is dominated: keep those within distance h*sqrt(dim) of the ball
    norms = np.linalg.norm(P, axis=1)
    P = P[norms <= 1.0 + h * np.sqrt(dim)]
    norms = np.linalg.norm(P, axis=1)
    P = P / np.maximum(norms, 1.0)[:, None]
    return np.unique(P, axis=0)


def epsnet_loss_bound(k: int, net_spacing: float) -> float:
    """Additive excess loss of the best net network on bounded data: 4 k^2 delta + k^2 delta^2."""
    return 4 * k * k * net_spacing + k * k * net_spacing ** 2


def _coeff_list(k, fixed_coeffs):
    if fixed_coeffs is not None:
        return [tuple(int(c) for c in fixed_coeffs)]
    return list(itertools.product((-1, 1), repeat=k))


def grid_search(data: Dataset, k: int, points: np.ndarray, fixed_coeffs=None, cap: int = EPSNET_CAP):
    """Exhaustive minimum of the loss over networks whose units all come from ``points``.

    Returns (loss, unit index tuple, coefficient tuple); ties go to the
    first candidate in (coefficients, index tuple) order.
    """
    X = data.dense_X()
    coeffs = _coeff_list(k, fixed_coeffs)
    P = points.shape[0]
    total = len(coeffs) * P ** k
    if total > cap:
        raise EnumerationCapExceeded(int(np.ceil(np.log2(total))), int(np.log2(cap)), total)
    H = relu(X @ points.T)  # m x P unit outputs
    w = data.weights / data.total_weight
    best = (np.inf, None, None)
    for a in coeffs:
        if k == 1:
            r = a[0] * H - data.y[:, None]
            L = w @ (r * r)
            i = int(np.argmin(L))
            if L[i] < best[0]:
                best = (float(L[i]), (i,), a)
            continue
        for head in itertools.product(range(P), repeat=k - 1):
            base = sum(a[j] * H[:, head[j]] for j in range(k - 1)) - data.y
            r = base[:, None] + a[-1] * H
            L = w @ (r * r)
            i = int(np.argmin(L))
            if L[i] < best[0]:
                best = (float(L[i]), head + (i,), a)
    return best


def train_epsnet(data: Dataset, k: int, net_spacing: float, seed: int = 0,
                 fixed_coeffs=None, cap: int = EPSNET_CAP) -> TrainResult:
    """Best network whose units all lie on an epsilon-net of the unit ball.

    On bounded data the loss is within epsnet_loss_bound(k, net_spacing)
    of the ball-constrained optimum.
    """
    if not data.bounded:
        raise ValueError("the epsilon-net baseline needs a bounded dataset")
    points = epsnet_points(data.dim, net_spacing, seed)
    loss, idx, a = grid_search(data, k, points, fixed_coeffs, cap)
    net = ReluNetwork(points[list(idx)], a)
    bits = (np.asarray(data.X @ net.unit_weights.T) >= 0).astype(np.uint8)
    return TrainResult(net, eval_loss(net, data), SignPattern(bits), a, loss,
                       len(_coeff_list(k, fixed_coeffs)) * points.shape[0] ** k)
