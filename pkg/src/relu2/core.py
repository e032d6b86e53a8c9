"""Domain types, network evaluation and the weighted squared-loss objective."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

NORM_SLACK = 1e-12


def relu(z):
    return np.maximum(z, 0.0)


@dataclass(frozen=True)
class Tolerances:
    kkt_tol: float = 1e-8
    loss_tol: float = 1e-6
    rank_tol: float = 1e-9

    def __post_init__(self):
        for name in ("kkt_tol", "loss_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class WeightedSample:
    x: np.ndarray
    y: float
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if not self.weight > 0:
            raise ValueError(f"sample weight must be positive, got {self.weight}")


class Dataset:
    """An ordered multiset of labelled samples stored as arrays.

    Multiplicities are positive real weights; the loss is the weighted
    average, which coincides with the plain average over copies.  ``X`` may
    be a dense array or a scipy CSR matrix (large reduction outputs).
    """

    def __init__(self, X, y, weights=None, bounded: bool = False, meta: dict | None = None):
        if sp.issparse(X):
            X = sp.csr_matrix(X, dtype=float)
        else:
            X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).reshape(-1)
        m = X.shape[0]
        if m == 0:
            raise ValueError("dataset must contain at least one sample")
        if y.shape[0] != m:
            raise ValueError(f"got {m} feature rows but {y.shape[0]} labels")
        if weights is None:
            weights = np.ones(m)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if weights.shape[0] != m:
            raise ValueError("one weight per sample is required")
        if not np.all(weights > 0):
            raise ValueError("sample weights must be positive")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(weights))):
            raise ValueError("labels and weights must be finite")
        self.X = X
        self.y = y
        self.weights = weights
        self.bounded = bool(bounded)
        self.meta = dict(meta or {})
        self.total_weight = float(weights.sum())
        if self.bounded:
            bad = [v for v in check_bounded(self) if v.kind == "x_norm"]
            if bad:
                raise ValueError(f"bounded dataset has {len(bad)} samples outside the unit ball")

    @classmethod
    def from_samples(cls, samples: Iterable[WeightedSample], dim: int | None = None,
                     bounded: bool = False, meta: dict | None = None) -> "Dataset":
        samples = list(samples)
        if not samples:
            raise ValueError("dataset must contain at least one sample")
        dims = {s.x.shape[0] for s in samples}
        if len(dims) != 1 or (dim is not None and dims != {dim}):
            raise ValueError("all sample vectors must have the dataset dimension")
        X = np.vstack([s.x for s in samples])
        return cls(X, [s.y for s in samples], [s.weight for s in samples], bounded, meta)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def samples(self) -> tuple[WeightedSample, ...]:
        return tuple(WeightedSample(self.dense_row(i), self.y[i], self.weights[i]) for i in range(self.m))

    def dense_row(self, i: int) -> np.ndarray:
        if sp.issparse(self.X):
            return self.X.getrow(i).toarray().ravel()
        return self.X[i].copy()

    def dense_X(self) -> np.ndarray:
        return self.X.toarray() if sp.issparse(self.X) else self.X

    def row_norms(self) -> np.ndarray:
        if sp.issparse(self.X):
            return np.sqrt(np.asarray(self.X.multiply(self.X).sum(axis=1)).ravel())
        return np.linalg.norm(self.X, axis=1)

    def with_meta(self, **extra) -> "Dataset":
        return Dataset(self.X, self.y, self.weights, self.bounded, {**self.meta, **extra})

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"Dataset(dim={self.dim}, m={self.m}, bounded={self.bounded}, total_weight={self.total_weight:g})"

    # -- JSON -----------------------------------------------------------
    def to_dict(self) -> dict:
        if self.m * self.dim > 50_000_000:
            raise ValueError(f"dataset with {self.m} x {self.dim} entries is too large for dense JSON")
        X = self.dense_X()
        return {
            "dim": self.dim,
            "bounded": self.bounded,
            "samples": [
                {"x": [float(v) for v in X[i]], "y": float(self.y[i]), "weight": float(self.weights[i])}
                for i in range(self.m)
            ],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Dataset":
        try:
            dim = int(d["dim"])
            rows = d["samples"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"dataset JSON is missing field {exc}") from None
        if not rows:
            raise ValueError("dataset JSON: 'samples' is empty")
        X = np.zeros((len(rows), dim))
        y = np.zeros(len(rows))
        w = np.ones(len(rows))
        for i, row in enumerate(rows):
            x = row.get("x")
            if x is None or len(x) != dim:
                raise ValueError(f"dataset JSON: samples[{i}].x must have length {dim}")
            X[i] = x
            if "y" not in row:
                raise ValueError(f"dataset JSON: samples[{i}] has no label 'y'")
            y[i] = row["y"]
            w[i] = row.get("weight", 1.0)
        return cls(X, y, w, bool(d.get("bounded", False)), d.get("meta") or {})


@dataclass(frozen=True)
class ReluNetwork:
    """Depth-2 network ``x -> sum_j coeffs[j] * relu(<unit_weights[j], x>)``."""

    unit_weights: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.unit_weights, dtype=float))
        a = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if W.shape[0] != a.shape[0]:
            raise ValueError(f"{W.shape[0]} weight vectors but {a.shape[0]} coefficients")
        if a.shape[0] == 0:
            raise ValueError("network needs at least one unit")
        if not np.all(np.isin(a, (-1.0, 1.0))):
            raise ValueError("coefficients must be -1 or +1; use normalize_coefficients for general values")
        object.__setattr__(self, "unit_weights", W)
        object.__setattr__(self, "coeffs", a)

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dim(self) -> int:
        return self.unit_weights.shape[1]

    def unit_norms(self) -> np.ndarray:
        return np.linalg.norm(self.unit_weights, axis=1)

    def is_bounded(self, slack: float = NORM_SLACK) -> bool:
        return bool(np.all(self.unit_norms() <= 1.0 + slack))

    def outputs(self, X) -> np.ndarray:
        """Network values on every row of ``X`` (dense or sparse)."""
        pre = X @ self.unit_weights.T
        return np.asarray(relu(pre)) @ self.coeffs

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "coeffs": [int(c) for c in self.coeffs],
            "weights": [[float(v) for v in row] for row in self.unit_weights],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReluNetwork":
        net = cls(d["weights"], d["coeffs"])
        if "k" in d and int(d["k"]) != net.k:
            raise ValueError(f"network JSON says k={d['k']} but lists {net.k} units")
        return net


def eval_network(net: ReluNetwork, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != net.dim:
        raise ValueError(f"input has length {x.shape[0]}, network expects {net.dim}")
    return float(net.coeffs @ relu(net.unit_weights @ x))


def eval_loss(net: ReluNetwork, data: Dataset) -> float:
    """Weighted average squared error of ``net`` on ``data``."""
    if net.dim != data.dim:
        raise ValueError(f"network dimension {net.dim} does not match dataset dimension {data.dim}")
    r = net.outputs(data.X) - data.y
    return float(data.weights @ (r * r) / data.total_weight)


def normalize_coefficients(general_coeffs, unit_weights) -> ReluNetwork:
    """Absorb coefficient magnitudes into the unit weights.

    Since relu is positively homogeneous, ``a * relu(<w, x>)`` equals
    ``sign(a) * relu(<|a| w, x>)``.
    """
    a = np.asarray(general_coeffs, dtype=float).reshape(-1)
    W = np.atleast_2d(np.asarray(unit_weights, dtype=float))
    if np.any(a == 0):
        raise ValueError("coefficients must be nonzero")
    return ReluNetwork(np.abs(a)[:, None] * W, np.sign(a))


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str  # "x_norm" or "label"
    value: float
    limit: float


def check_bounded(data: Dataset, k: int | None = None) -> list[Violation]:
    """List samples violating ||x|| <= 1 or, when ``k`` is given, |y| <= k."""
    out = []
    norms = data.row_norms()
    for i in np.flatnonzero(norms > 1.0 + NORM_SLACK):
        out.append(Violation(int(i), "x_norm", float(norms[i]), 1.0))
    if k is not None:
        for i in np.flatnonzero(np.abs(data.y) > k * (1.0 + NORM_SLACK)):
            out.append(Violation(int(i), "label", float(abs(data.y[i])), float(k)))
    return sorted(out, key=lambda v: (v.index, v.kind))


def pad_dimensions(data: Dataset, new_dim: int) -> Dataset:
    if new_dim < data.dim:
        raise ValueError(f"cannot pad from dimension {data.dim} down to {new_dim}")
    extra = new_dim - data.dim
    if sp.issparse(data.X):
        X = sp.hstack([data.X, sp.csr_matrix((data.m, extra))], format="csr")
    else:
        X = np.hstack([data.X, np.zeros((data.m, extra))])
    return Dataset(X, data.y, data.weights, data.bounded, data.meta)


def pad_network(net: ReluNetwork, new_dim: int, fill: float = 0.0) -> ReluNetwork:
    if new_dim < net.dim:
        raise ValueError("cannot shrink a network")
    W = np.hstack([net.unit_weights, np.full((net.k, new_dim - net.dim), fill)])
    return ReluNetwork(W, net.coeffs)


# -- JSON helpers shared by every module ------------------------------------

def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj: Any) -> str:
    # float repr is the shortest string that round-trips a 64-bit value exactly
    return json.dumps(obj, default=_default, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def as_network(weights: Sequence[Sequence[float]], coeffs: Sequence[float]) -> ReluNetwork:
    return ReluNetwork(np.asarray(weights, dtype=float), np.asarray(coeffs, dtype=float))
