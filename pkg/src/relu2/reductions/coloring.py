"""Bounded sum-of-k-ReLUs construction from hypergraph k-coloring."""

from __future__ import annotations

import math

import numpy as np

from ..core import Dataset, ReluNetwork
from .instances import Hypergraph
from .output import ReductionOutput

GAMMA_FRAC_CAP = 2_000_000


def coloring_label(t: int, n: int) -> float:
    return 1.0 / (t * math.sqrt(t * n))


def soundness_bound(gamma_frac: float, k: int, t: int, N: int) -> float:
    return gamma_frac / (100.0 * k * k * t ** 5 * N)


def reduce_coloring(h: Hypergraph, k: int, gamma_frac: float | None = None,
                    brute_force_cap: int = GAMMA_FRAC_CAP) -> ReductionOutput:
    """Samples realizable by k unit-norm ReLUs with unit coefficients iff h is k-colorable.

    Per vertex i: (e_i, 1/(t sqrt(t n))) with weight deg(i).  Per hyperedge e:
    ((1/sqrt t) sum_{v in e} e_v, 0) with weight 1.  ``gamma_frac`` is the
    least monochromatic edge fraction over all k-colorings; it is found by
    brute force when k^N is at most ``brute_force_cap``, and the soundness
    bound is only recorded when it is known.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if h.M == 0:
        raise ValueError("hypergraph has no edges")
    deg = h.degrees()
    isolated = [v for v, d in enumerate(deg) if d == 0]
    if isolated:
        raise ValueError(f"vertices {isolated} are isolated and would get zero-weight samples; remove them first")
    N, M, t = h.N, h.M, h.max_edge_size
    n = N
    label = coloring_label(t, n)
    X = np.zeros((N + M, n))
    X[np.arange(N), np.arange(N)] = 1.0
    for r, e in enumerate(h.edges):
        X[N + r, list(e)] = 1.0 / math.sqrt(t)
    y = np.concatenate([np.full(N, label), np.zeros(M)])
    w = np.concatenate([np.asarray(deg, dtype=float), np.ones(M)])
    data = Dataset(X, y, w, bounded=True, meta={"kind": "coloring"})

    best_coloring = None
    if gamma_frac is None and k ** N <= brute_force_cap:
        gamma_frac, best_coloring = h.min_monochromatic_fraction(k, brute_force_cap)
    cert = {"mode": "soundness", "opt": 0.0,
            "soundness_bound_per_gamma": soundness_bound(1.0, k, t, N),
            "formula": "gamma_frac / (100 k^2 t^5 N)"}
    if gamma_frac is not None:
        cert["gamma_frac"] = float(gamma_frac)
        cert["soundness_bound"] = soundness_bound(gamma_frac, k, t, N)
        cert["colorable"] = gamma_frac == 0
    return ReductionOutput(
        data, "coloring",
        params={"k": k, "t": t, "N": N, "M": M, "n": n, "label": label},
        certificate=cert,
        witness_recipe={"instance": h.to_dict(), "k": k,
                        "best_coloring": list(best_coloring) if best_coloring is not None else None},
    )


def coloring_witness(out: ReductionOutput, chi) -> ReluNetwork:
    """Unit a gets 1/(t sqrt(t n)) on vertices of color a and -1/sqrt(n) elsewhere; coefficients all +1."""
    p = out.params
    k, N, n = p["k"], p["N"], p["n"]
    chi = [int(c) for c in chi]
    if len(chi) != N:
        raise ValueError(f"coloring must assign a color to each of the {N} vertices")
    if any(not 0 <= c < k for c in chi):
        raise ValueError(f"colors must lie in 0..{k - 1}")
    chi = np.array(chi)
    W = np.full((k, n), -1.0 / math.sqrt(n))
    for a in range(k):
        W[a, chi == a] = p["label"]
    return ReluNetwork(W, np.ones(k))


def pad_coloring(h: Hypergraph, k: int) -> Hypergraph:
    """Add k-2 dummy vertices N..N+k-3 to the vertex set and to every edge of a 3-uniform hypergraph."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if h.M == 0 or any(len(e) != 3 for e in h.edges):
        raise ValueError("padding expects a 3-uniform hypergraph")
    dummies = tuple(range(h.N, h.N + k - 2))
    return Hypergraph(h.N + k - 2, tuple(tuple(e) + dummies for e in h.edges))


def lift_coloring(chi, k: int) -> list[int]:
    """Extend a coloring of the original vertices by giving the dummies colors 2..k-1."""
    return [int(c) for c in chi] + list(range(2, k))
