"""Negative-coefficient gadget, general-position point sets and composition."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..core import Dataset, ReluNetwork, Tolerances
from .output import ReductionOutput

TAU_CAP = 10_000_000
AUDIT_EXHAUSTIVE_CAP = 200_000
AUDIT_SAMPLES = 20_000
MAX_ROUNDS = 100


class GeneralPositionError(RuntimeError):
    pass


def _sigma_min_sq(P: np.ndarray) -> np.ndarray:
    """Squared smallest singular value of every matrix in a (s, d, d) stack."""
    return np.linalg.svd(P, compute_uv=False)[:, -1] ** 2


def _subsets(count: int, dim: int, rng: np.random.Generator):
    total = math.comb(count, dim)
    if total <= AUDIT_EXHAUSTIVE_CAP:
        return np.array(list(itertools.combinations(range(count), dim)), dtype=int)
    picks = np.array([np.sort(rng.choice(count, dim, replace=False)) for _ in range(AUDIT_SAMPLES)])
    return picks


def audit_general_position(points: np.ndarray, rank_tol: float, seed: int = 0) -> float:
    """Smallest singular value over all dim-subsets (or a seeded random sample of them)."""
    points = np.asarray(points, dtype=float)
    count, dim = points.shape
    if count < dim:
        raise ValueError("need at least dim points")
    idx = _subsets(count, dim, np.random.default_rng(seed))
    smin = np.inf
    for chunk in np.array_split(idx, max(1, len(idx) // 50_000)):
        smin = min(smin, float(np.sqrt(_sigma_min_sq(points[chunk]).min())))
    return smin


def generate_general_position(dim: int, count: int, center, radius: float, seed: int = 0,
                              tol: Tolerances | None = None, method: str = "rejection") -> np.ndarray:
    """``count`` points in the ball B(center, radius) with every dim-subset linearly independent.

    ``method="rejection"`` draws uniform points and audits them, redrawing up
    to 100 times.  ``method="moment"`` places points on a scaled moment
    curve around ``center``, which is deterministic and needs center != 0.
    """
    tol = tol or Tolerances()
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.shape[0] != dim:
        raise ValueError(f"center has length {center.shape[0]}, expected {dim}")
    if count < dim:
        raise ValueError("count must be at least dim")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if method == "moment":
        pts = _moment_points(dim, count, center, radius)
        if audit_general_position(pts, tol.rank_tol, seed) <= tol.rank_tol:
            raise GeneralPositionError("moment-curve points are not in general position at this tolerance")
        return pts
    if method != "rejection":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ROUNDS):
        g = rng.standard_normal((count, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.random(count) ** (1.0 / dim)
        pts = center + g * r[:, None]
        if audit_general_position(pts, tol.rank_tol, int(rng.integers(2 ** 31))) > tol.rank_tol:
            return pts
    raise GeneralPositionError(f"no general-position sample found in {MAX_ROUNDS} rounds")


def _moment_points(dim: int, count: int, center: np.ndarray, radius: float) -> np.ndarray:
    c_norm = np.linalg.norm(center)
    if c_norm == 0:
        raise ValueError("moment-curve construction needs a nonzero center")
    if dim == 1:
        return center * (1.0 + 0.999 * radius / c_norm * np.linspace(-1, 1, count))[:, None]
    # orthonormal basis whose first vector is along the center
    Q, _ = np.linalg.qr(np.column_stack([center, np.eye(dim)]))
    U = Q[:, 1:dim]
    rho = 0.999 * radius / math.sqrt(dim - 1)
    t = np.arange(1, count + 1) / count
    powers = t[:, None] ** np.arange(1, dim)[None, :]
    return center + rho * powers @ U.T


def _sign_vectors(k: int) -> list[tuple]:
    return [u for u in itertools.product((-1, 1), repeat=k) if any(v == 1 for v in u)]


def compute_tau(point_sets, k: int, total_samples: int | None = None, cap: int = TAU_CAP) -> float | None:
    """tau = 0.1/(k |S|) * min(1, min over sets and k-subsets of sigma_min^2); None past the cap.

    ``total_samples`` is |S|, defaulting to the number of points over all sets.
    """
    sets = [np.asarray(P, dtype=float) for P in point_sets]
    if total_samples is None:
        total_samples = sum(len(P) for P in sets)
    work = sum(math.comb(len(P), k) for P in sets)
    if work > cap:
        return None
    inner = 1.0
    for P in sets:
        if P.shape[1] != k or len(P) < k:
            raise ValueError("every point set needs at least k points of dimension k")
        idx = np.array(list(itertools.combinations(range(len(P)), k)), dtype=int)
        for chunk in np.array_split(idx, max(1, len(idx) // 50_000)):
            inner = min(inner, float(_sigma_min_sq(P[chunk]).min()))
    return 0.1 / (k * total_samples) * inner


def build_gadget(k: int, points_per_set: int | None = None, seed: int = 0, simple_pair: bool = False,
                 method: str = "rejection", tol: Tolerances | None = None) -> ReductionOutput:
    """Samples realizable by a sum of k ReLUs only when every coefficient is +1.

    For every sign vector u other than all -1, ``points_per_set`` points in
    general position inside B(u/(2 sqrt k), 0.01/k), labelled by
    f(x) = sum_j relu(x_j).  The default size is 2^k k.  With
    ``simple_pair`` the samples are (e_1, 1) and (-e_1, 1).
    """
    if k < 2:
        raise ValueError("the gadget needs k >= 2")
    if simple_pair:
        X = np.zeros((2, k))
        X[0, 0], X[1, 0] = 1.0, -1.0
        data = Dataset(X, [1.0, 1.0], bounded=True, meta={"kind": "gadget", "simple_pair": True})
        return ReductionOutput(
            data, "gadget",
            params={"k": k, "simple_pair": True, "points_per_set": 1, "n": k},
            certificate={"mode": "completeness", "opt": 0.0, "tau_status": "unavailable"},
            witness_recipe={"k": k, "simple_pair": True},
        )
    if points_per_set is None:
        points_per_set = 2 ** k * k
    if points_per_set < k:
        raise ValueError("points_per_set must be at least k")
    signs = _sign_vectors(k)
    sets = []
    for i, u in enumerate(signs):
        center = np.asarray(u, dtype=float) / (2.0 * math.sqrt(k))
        sets.append(generate_general_position(k, points_per_set, center, 0.01 / k,
                                              seed=seed * 1_000_003 + i, tol=tol, method=method))
    X = np.vstack(sets)
    y = np.maximum(X, 0.0).sum(axis=1)
    data = Dataset(X, y, bounded=True, meta={"kind": "gadget", "seed": seed})
    tau = compute_tau(sets, k, total_samples=len(X))
    cert = {"mode": "completeness", "opt": 0.0}
    if tau is None:
        cert["tau_status"] = "unavailable"
    else:
        cert["tau"] = tau
        cert["tau_status"] = "exact"
    return ReductionOutput(
        data, "gadget",
        params={"k": k, "simple_pair": False, "points_per_set": points_per_set, "n": k,
                "sets": len(signs), "seed": seed},
        certificate=cert,
        witness_recipe={"k": k, "simple_pair": False, "sign_vectors": [list(u) for u in signs]},
    )


def gadget_point_sets(out: ReductionOutput) -> list[np.ndarray]:
    p = out.params
    if p.get("simple_pair"):
        raise ValueError("the simple-pair gadget has no point sets")
    X = out.dataset.dense_X()
    s = p["points_per_set"]
    return [X[i * s:(i + 1) * s] for i in range(p["sets"])]


def gadget_witness(out: ReductionOutput, solution=None) -> ReluNetwork:
    k = out.params["k"]
    if out.params.get("simple_pair"):
        W = np.zeros((k, k))
        W[0, 0], W[1, 0] = 1.0, -1.0
        return ReluNetwork(W, np.ones(k))
    return ReluNetwork(np.eye(k), np.ones(k))


def compose_with_gadget(base, k: int, gadget: ReductionOutput) -> ReductionOutput:
    """Append the gadget in k fresh coordinates so that a negative coefficient costs loss.

    Original samples become (x o 0_k, y/2) with weight multiplied by the
    gadget's total weight; gadget samples become (0_n o x~, y~/2) with weight
    multiplied by the original total weight, so both halves weigh the same.
    ``base`` is a Dataset or a ReductionOutput.
    """
    inner = base if isinstance(base, ReductionOutput) else None
    data = inner.dataset if inner is not None else base
    if gadget.kind != "gadget":
        raise ValueError("the second argument must be a gadget")
    if gadget.params["k"] != k:
        raise ValueError(f"gadget was built for k={gadget.params['k']}, not k={k}")
    g = gadget.dataset
    n = data.dim
    X = np.zeros((data.m + g.m, n + k))
    X[: data.m, :n] = data.dense_X()
    X[data.m:, n:] = g.dense_X()
    y = 0.5 * np.concatenate([data.y, g.y])
    w = np.concatenate([data.weights * g.total_weight, g.weights * data.total_weight])
    out_data = Dataset(X, y, w, bounded=data.bounded and g.bounded, meta={"kind": "compose"})
    tau = gadget.certificate.get("tau")
    cert = {"mode": "completeness", "opt": 0.0 if inner is None else inner.certificate.get("opt", 0.0),
            "half_weight": data.total_weight * g.total_weight}
    if tau is not None:
        # labels are halved, so the gadget half costs tau/4 of its own loss
        cert["negative_coeff_bound"] = 0.5 * 0.25 * tau
    return ReductionOutput(
        out_data, "compose",
        params={"k": k, "n_base": n, "m_base": data.m, "m_gadget": g.m, "n": n + k},
        certificate=cert,
        witness_recipe={"base_kind": inner.kind if inner is not None else None,
                        "base": _recipe_dict(inner), "gadget": _recipe_dict(gadget)},
    )


def _recipe_dict(out: ReductionOutput | None):
    if out is None:
        return None
    return {"kind": out.kind, "params": out.params, "certificate": out.certificate,
            "witness_recipe": out.witness_recipe, "dim": out.dataset.dim}


def compose_witness(base_net: ReluNetwork, gadget_net: ReluNetwork) -> ReluNetwork:
    """Units 0.5 w^j o 0.5 w~^j with all-ones coefficients."""
    if base_net.k != gadget_net.k:
        raise ValueError("both networks need the same number of units")
    if not (np.all(base_net.coeffs == 1) and np.all(gadget_net.coeffs == 1)):
        raise ValueError("composition expects all-ones coefficients")
    return ReluNetwork(np.hstack([0.5 * base_net.unit_weights, 0.5 * gadget_net.unit_weights]), np.ones(base_net.k))
