"""Bounded single-ReLU construction from Densest-kappa-Subgraph.

Copy counts are encoded as normalized sample weights.  For large graphs
the feature matrix is stored sparsely, since every row has at most three
nonzeros.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..core import Dataset, ReluNetwork
from .instances import Hypergraph
from .output import NonPositiveGap, ReductionOutput

SPARSE_ABOVE = 2000


def dks_constants(N: int, M: int, d: int, kappa: int, ell: int) -> dict:
    delta = 1.0 / (2.0 * math.sqrt(kappa))
    gamma = 1.0 / (1000.0 * d)
    zeta = 1.0 / (1e10 * d * d)
    r2 = math.sqrt(2.0)
    opt = ((1 - gamma) * zeta * (1 - kappa * delta / (r2 * N) + kappa * delta ** 2 / (8 * N))
           + gamma * zeta * (1 - ell * delta / (2 * r2 * M) + ell * delta ** 2 / (32 * M)))
    eps = (gamma * zeta * ell * delta / (4 * r2 * M)
           - (1 - gamma) * zeta * kappa * delta ** 2 / (8 * N)
           - gamma * zeta * ell * delta ** 2 / (32 * M))
    return {"delta": delta, "gamma": gamma, "zeta": zeta, "opt": opt, "epsilon": eps}


def reduce_dks(g: Hypergraph, kappa: int, ell: int, allow_nonpositive_gap: bool = False,
               sparse: bool | None = None) -> ReductionOutput:
    """Weighted samples whose ball-constrained single-ReLU loss separates dense from sparse graphs.

    Coordinates are the vertices followed by a star coordinate.  Samples:
    (e_star, 1/sqrt2) with weight 1 - zeta; per vertex v,
    (0.5 (e_v - delta e_star), 1) with weight (1 - gamma) zeta / N; per edge
    {u, v}, (0.5 (e_u + e_v - 3.5 delta e_star), 1) with weight gamma zeta / M.

    Raises NonPositiveGap when the gap formula is not positive, unless
    ``allow_nonpositive_gap`` is set.
    """
    if not g.is_graph:
        raise ValueError("densest-subgraph reduction needs a graph (all edges of size 2)")
    if g.M == 0:
        raise ValueError("graph has no edges")
    if kappa < 2 or kappa > g.N:
        raise ValueError(f"kappa must lie in 2..{g.N}")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    N, M, d = g.N, g.M, g.max_degree
    c = dks_constants(N, M, d, kappa, ell)
    delta, gamma, zeta = c["delta"], c["gamma"], c["zeta"]
    n = N + 1
    star = N
    m = 1 + N + M
    if sparse is None:
        sparse = N > SPARSE_ABOVE

    rows = np.concatenate([[0], 1 + np.arange(N), 1 + np.arange(N), 1 + N + np.repeat(np.arange(M), 3)])
    edges = np.array(g.edges, dtype=int)
    cols = np.concatenate([[star], np.arange(N), np.full(N, star),
                           np.column_stack([edges, np.full(M, star)]).ravel()])
    vals = np.concatenate([[1.0], np.full(N, 0.5), np.full(N, -0.5 * delta),
                           np.tile([0.5, 0.5, -1.75 * delta], M)])
    X = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
    if not sparse:
        X = X.toarray()
    y = np.concatenate([[1.0 / math.sqrt(2.0)], np.ones(N + M)])
    w = np.concatenate([[1.0 - zeta], np.full(N, (1 - gamma) * zeta / N), np.full(M, gamma * zeta / M)])
    data = Dataset(X, y, w, bounded=True, meta={"kind": "dks"})
    out = ReductionOutput(
        data, "dks",
        params={"N": N, "M": M, "d": d, "kappa": kappa, "ell": ell, "n": n,
                "delta": delta, "gamma": gamma, "zeta": zeta},
        certificate={"mode": "gap", "opt": c["opt"], "gap": c["epsilon"],
                     "group_weights": [1.0 - zeta, (1 - gamma) * zeta, gamma * zeta]},
        witness_recipe={"instance": {"n": N, "edges": [list(e) for e in g.edges]} if m <= 200_000 else None,
                        "star_coord": star},
    )
    if c["epsilon"] <= 0 and not allow_nonpositive_gap:
        raise NonPositiveGap(c["epsilon"], out)
    return out


def dks_witness(out: ReductionOutput, vertices) -> ReluNetwork:
    """w_star = 1/sqrt2 and w_v = delta sqrt2 for v in the chosen set; unit norm when |T| = kappa."""
    T = sorted(set(int(v) for v in vertices))
    p = out.params
    if len(T) != p["kappa"]:
        raise ValueError(f"need exactly kappa = {p['kappa']} vertices, got {len(T)}")
    if T and (T[0] < 0 or T[-1] >= p["N"]):
        raise ValueError("vertex out of range")
    w = np.zeros(p["n"])
    w[out.witness_recipe["star_coord"]] = 1.0 / math.sqrt(2.0)
    w[T] = p["delta"] * math.sqrt(2.0)
    return ReluNetwork(w[None, :], [1.0])


def dks_witness_parts(out: ReductionOutput, induced_edges: int) -> dict:
    """Closed-form loss split of the witness for a kappa-set inducing ``induced_edges`` edges."""
    p = out.params
    delta, gamma, zeta = p["delta"], p["gamma"], p["zeta"]
    N, M, kappa = p["N"], p["M"], p["kappa"]
    r2 = math.sqrt(2.0)
    card = (1 - gamma) * zeta * (1 - kappa * delta / (r2 * N) + kappa * delta ** 2 / (8 * N))
    edge = gamma * zeta / M * (M - induced_edges * delta / (2 * r2) + induced_edges * delta ** 2 / 32)
    return {"star": 0.0, "card": card, "edge": edge, "total": card + edge}


def dks_loss_parts(out: ReductionOutput, net: ReluNetwork) -> dict:
    """Evaluate the three sample groups of the loss separately."""
    data = out.dataset
    N, M = out.params["N"], out.params["M"]
    r = net.outputs(data.X) - data.y
    contrib = data.weights * r * r / data.total_weight
    return {"star": float(contrib[0]), "card": float(contrib[1:1 + N].sum()),
            "edge": float(contrib[1 + N:].sum()), "total": float(contrib.sum())}
