"""Least squares over a polyhedral cone, optionally intersected with per-block balls.

The problem is

    minimize  0.5 * ||A z - b||^2
    s.t.      g_i . z <= 0  (or >= 0)   for every listed inequality
              ||z[block]|| <= radius    for every ball block

The cone part is handled by a primal active-set method that starts at the
origin (always feasible, since every constraint is homogeneous) and walks
through working sets, taking minimum-displacement least-squares steps in
the null space of the active constraints.  Ball blocks are dualised inside
a proximal-point loop: for multipliers mu the inner problem is a
cone-constrained ridge problem, and each mu_B solves ||z_B(mu)|| = radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, linprog

from .core import Tolerances, dumps

OPTIMAL = "optimal"
BUDGET_EXHAUSTED = "budget_exhausted"
DEFAULT_MAX_ITER = 100_000

_LE = {"<=", "<=0", "le", "leq"}
_GE = {">=", ">=0", "ge", "geq"}


def _sense_sign(sense: str) -> float:
    s = str(sense).strip().lower().replace(" ", "")
    if s in _LE:
        return 1.0
    if s in _GE:
        return -1.0
    raise ValueError(f"unknown inequality sense {sense!r}; use '<=' or '>='")


@dataclass
class ClsProblem:
    design: np.ndarray
    target: np.ndarray
    inequalities: list = field(default_factory=list)
    ball_blocks: list = field(default_factory=list)

    def __post_init__(self):
        self.design = np.atleast_2d(np.asarray(self.design, dtype=float))
        self.target = np.asarray(self.target, dtype=float).reshape(-1)
        r, d = self.design.shape
        if self.target.shape[0] != r:
            raise ValueError(f"design has {r} rows but target has length {self.target.shape[0]}")
        rows = []
        for g, sense in self.inequalities:
            g = np.asarray(g, dtype=float).reshape(-1)
            if g.shape[0] != d:
                raise ValueError(f"inequality vector has length {g.shape[0]}, expected {d}")
            rows.append(_sense_sign(sense) * g)
        self._G = np.array(rows).reshape(len(rows), d)
        seen = set()
        blocks = []
        for idx, radius in self.ball_blocks:
            idx = np.asarray(idx, dtype=int).reshape(-1)
            if not radius > 0:
                raise ValueError("ball radii must be positive")
            if idx.size == 0 or idx.min() < 0 or idx.max() >= d:
                raise ValueError("ball block indices out of range")
            if seen & set(idx.tolist()) or len(set(idx.tolist())) != idx.size:
                raise ValueError("ball blocks must be disjoint")
            seen |= set(idx.tolist())
            blocks.append((idx, float(radius)))
        self.ball_blocks = blocks
        # homogeneous constraints and norm bounds always admit the origin
        assert np.all(self._G @ np.zeros(d) <= 0.0)

    @property
    def dim(self) -> int:
        return self.design.shape[1]

    @property
    def le_matrix(self) -> np.ndarray:
        """All inequalities rewritten in the form ``G z <= 0``."""
        return self._G

    def objective(self, z) -> float:
        r = self.design @ z - self.target
        return 0.5 * float(r @ r)

    def to_dict(self) -> dict:
        return {
            "design": self.design,
            "target": self.target,
            "inequalities": [{"g": g, "sense": "<="} for g in self._G],
            "ball_blocks": [{"indices": idx, "radius": r} for idx, r in self.ball_blocks],
        }

    def dump_json(self) -> str:
        """Diagnostic dump for bug reports."""
        return dumps(self.to_dict())


@dataclass(frozen=True)
class SolveOutcome:
    z_star: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: str = OPTIMAL
    working_set: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _null_space(GW: np.ndarray, d: int) -> np.ndarray:
    if GW.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(GW)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


def _lstsq(M: np.ndarray, rhs: np.ndarray, cutoff: float) -> np.ndarray:
    """Minimum-norm least squares treating singular values below ``cutoff`` as zero."""
    if M.size == 0:
        return np.zeros(M.shape[1])
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    keep = s > cutoff
    return vt[keep].T @ ((u[:, keep].T @ rhs) / s[keep])


def _normalize_rows(G: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(G, axis=1)
    keep = norms > 0
    return G[keep] / norms[keep, None], np.flatnonzero(keep)


def _kkt(A, b, G, z, lam, mu_terms=None):
    grad = A.T @ (A @ z - b)
    if mu_terms is not None:
        grad = grad + mu_terms
    stat = grad + G.T @ lam if G.shape[0] else grad
    parts = [np.max(np.abs(stat)) if stat.size else 0.0]
    if G.shape[0]:
        Gz = G @ z
        parts += [max(0.0, float(Gz.max())), float(np.max(np.abs(lam * Gz))), max(0.0, float(-lam.min()))]
    return float(max(parts))


def _escape(A, b, G, z, grad, active, scale):
    """Optimality test at a degenerate point, or a strict descent step from it.

    Minimizes grad.p over the tangent cone intersected with the unit box by
    LP, which stays reliable when active rows are nearly dependent.  Returns
    ("opt", lam) or ("step", z, W).
    """
    GI = G[active]
    res = linprog(grad, A_ub=GI, b_ub=np.zeros(len(active)), bounds=[(-1.0, 1.0)] * G.shape[1],
                  method="highs")
    gn = float(np.linalg.norm(grad))
    if res.status != 0 or -res.fun <= 1e-12 * max(scale, gn):
        lam = np.zeros(G.shape[0])
        if res.status == 0:
            lam[active] = np.maximum(-res.ineqlin.marginals, 0.0)
        return "opt", lam
    p = res.x
    # make p exactly feasible on its tight rows
    tight = active[GI @ p >= -1e-9]
    if tight.size:
        N = _null_space(G[tight], G.shape[1])
        p = N @ (N.T @ p)
    Ap = A @ p
    r = A @ z - b
    slope = float(r @ Ap)
    # directions (nearly) in the null space of A are flat, not descent
    r_noise = float(np.linalg.norm(r)) + 1e-4 * float(np.linalg.norm(A)) * float(np.linalg.norm(z))
    if slope >= -1e-12 * r_noise * float(np.linalg.norm(Ap)) or not np.any(Ap):
        lam = np.zeros(G.shape[0])
        lam[active] = np.maximum(-res.ineqlin.marginals, 0.0)
        return "opt", lam
    alpha = -slope / float(Ap @ Ap)
    Gp = G @ p
    Gz = G @ z
    block = np.flatnonzero((Gp > 1e-14) & (Gz < 0))
    if block.size:
        alpha = min(alpha, float(np.min(-Gz[block] / Gp[block])))
    z = z + alpha * p
    Gz = G @ z
    W = []
    for i in np.flatnonzero(Gz >= -1e-12 * max(1.0, float(np.linalg.norm(z)))):
        cand = W + [int(i)]
        if np.linalg.matrix_rank(G[cand], tol=1e-10) == len(cand):
            W = cand
    return "step", z, W

def _cone_lsq(A, b, G, max_iter, working=()):
    """Active-set core on unit-norm rows ``G``; returns (z, lam, iters, ok, W)."""
    d = A.shape[1]
    z = np.zeros(d)
    W = []
    for i in working:
        cand = W + [i]
        if np.linalg.matrix_rank(G[cand], tol=1e-10) == len(cand):
            W = cand
    scale = max(1.0, float(np.linalg.norm(A) * np.linalg.norm(b)))
    lam_tol = 1e-13 * scale
    a_fro, b_norm = float(np.linalg.norm(A)), float(np.linalg.norm(b))
    a_cut = 1e-12 * max(1.0, float(np.linalg.norm(A, 2)))
    seen = set()
    bland = False
    lam_W = np.zeros(0)
    for it in range(1, max_iter + 1):
        N = _null_space(G[W], d)
        if N.shape[1]:
            u = _lstsq(A @ N, b, a_cut)
            target = N @ u
        else:
            target = np.zeros(d)
        p = target - z
        pn = float(np.linalg.norm(p))
        # a step at rounding level means z already minimizes over the face
        if pn > 1e-13 * max(1.0, float(np.linalg.norm(z))):
            Gp = G @ p
            # rows (nearly) spanned by the working set cannot block a face step
            indep = np.linalg.norm(G @ N, axis=1) > 1e-10
            cand = [i for i in np.flatnonzero((Gp > 1e-13 * pn) & indep) if i not in W]
            if cand:
                cand = np.array(cand)
                alphas = np.maximum(-(G[cand] @ z), 0.0) / Gp[cand]
                amin = alphas.min()
                if amin < 1.0:
                    if bland:
                        block = int(cand[alphas <= amin * (1 + 1e-12) + 1e-300].min())
                    else:
                        block = int(cand[np.argmin(alphas)])
                    z = z + amin * p
                    W.append(block)
                    continue
            z = target
        grad = A.T @ (A @ z - b)
        if W:
            lam_W = _lstsq(G[W].T, -grad, 1e-12)
        else:
            lam_W = np.zeros(0)
        # gradient rounding grows with ||z||, so the multiplier test does too
        noise = 1e-13 * a_fro * (a_fro * float(np.linalg.norm(z)) + b_norm)
        neg = np.flatnonzero(lam_W < -max(lam_tol, noise))
        if neg.size == 0:
            lam = np.zeros(G.shape[0])
            lam[W] = np.maximum(lam_W, 0.0)
            return z, lam, it, True, tuple(W)
        active = np.flatnonzero(G @ z >= -1e-12 * max(1.0, float(np.linalg.norm(z))))
        if bland or active.size > len(W):
            # degenerate point: multipliers on W alone are unreliable, so test
            # the full tangent cone and step along the projected gradient
            esc = _escape(A, b, G, z, grad, active, max(scale, noise / 1e-13))
            if esc[0] == "opt":
                return z, esc[1], it, True, tuple(W)
            _, z, W = esc
            seen.clear()
            bland = False
            continue
        key = frozenset(W)
        if key in seen:
            bland = True
        seen.add(key)
        if bland:
            drop = min(neg, key=lambda t: W[t])
        else:
            drop = int(neg[np.argmin(lam_W[neg])])
        W.pop(int(drop))
    lam = np.zeros(G.shape[0])
    if W and lam_W.size == len(W):
        lam[W] = np.maximum(lam_W, 0.0)
    return z, lam, max_iter, False, tuple(W)


def solve_cone_lsq(A, b, G=None, blocks=(), radii=(), tol: Tolerances | None = None,
                   max_iter: int = DEFAULT_MAX_ITER, working=()) -> SolveOutcome:
    """Array-level entry point: minimize 0.5||Az-b||^2 s.t. G z <= 0 and block balls.

    ``blocks`` is a sequence of index arrays and ``radii`` the matching ball
    radii.  The returned working set refers to rows of ``G``.
    """
    tol = tol or Tolerances()
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    d = A.shape[1]
    G_raw = np.zeros((0, d)) if G is None else np.asarray(G, dtype=float).reshape(-1, d)
    G, kept = _normalize_rows(G_raw)
    work = [int(np.searchsorted(kept, w)) for w in working if w in set(kept.tolist())]

    z, lam, iters, ok, W = _cone_lsq(A, b, G, max_iter, work)
    mu = np.zeros(len(blocks))
    if len(blocks):
        z, lam, mu, extra, ok2, W = _ball_loop(A, b, G, z, lam, W, blocks, radii, tol, max_iter)
        iters += extra
        ok = ok and ok2
    mu_terms = np.zeros(d)
    for j, idx in enumerate(blocks):
        mu_terms[idx] = mu[j] * z[idx]
    kkt = _kkt(A, b, G, z, lam, mu_terms)
    for j, idx in enumerate(blocks):
        nz = float(np.linalg.norm(z[idx]))
        kkt = max(kkt, max(0.0, nz - radii[j]), abs(mu[j] * (nz - radii[j])))
    if ok and kkt > tol.kkt_tol * max(1.0, float(np.linalg.norm(A.T @ b))):
        ok = False
    r = A @ z - b
    W_orig = tuple(int(kept[w]) for w in W)
    return SolveOutcome(z, 0.5 * float(r @ r), kkt, iters, OPTIMAL if ok else BUDGET_EXHAUSTED, W_orig)


def _ball_loop(A, b, G, z0, lam0, W0, blocks, radii, tol, max_iter):
    """Proximal-point outer loop around the dual ball solve.

    Each round adds rho/2 ||z - z_c||^2 around the previous iterate z_c,
    which keeps z(mu) unique and the dual well conditioned even when the
    original problem has many minimizers.  The stationarity defect left
    by the proximal term is rho ||z - z_c|| and shrinks geometrically.
    """
    d = A.shape[1]
    nb = len(blocks)
    radii = np.array([float(r) for r in radii])
    if all(np.linalg.norm(z0[idx]) <= r for idx, r in zip(blocks, radii)):
        return z0, lam0, np.zeros(nb), 0, True, W0
    scale = max(1.0, float(np.linalg.norm(A, 2)) ** 2)
    target = 0.1 * tol.kkt_tol * max(1.0, float(np.linalg.norm(A.T @ b)))
    rho = 1e-2 * scale
    state = {"W": W0, "iters": 0, "ok": True}
    zc = z0.copy()
    mu = np.zeros(nb)
    z, lam, W, done = z0, lam0, W0, False
    for _round in range(500):
        z, lam, mu, W, done = _ball_dual(A, b, G, zc, rho, mu, blocks, radii, state, max_iter)
        move = rho * float(np.max(np.abs(z - zc)))
        zc = z
        if done and move <= target:
            break
        if state["iters"] > max_iter:
            done = False
            break
        rho = max(0.3 * rho, 1e-6 * scale)
    else:
        done = False
    norms = np.array([np.linalg.norm(z[idx]) for idx in blocks])
    # uniform shrink stays inside the cone and clears rounding-level ball violations
    c = min(1.0, float(np.min(radii / np.maximum(norms, 1e-300))))
    return c * z, lam, mu, state["iters"], state["ok"] and done, W


def _ball_dual(A, b, G, zc, rho, mu0, blocks, radii, state, max_iter):
    """Maximize the concave dual of the proximal ball problem over mu >= 0.

    For fixed mu the inner problem is the cone-constrained ridge problem
    with weights rho + mu_j on block j.  The dual gradient is
    0.5 (||z_j||^2 - r_j^2) and, on a fixed working set with null-space
    basis N, the Hessian is -Z^T N M^-1 N^T Z with Z holding the block parts
    of z.  Projected Newton with backtracking runs first, then coordinate
    root-finding sweeps polish the complementarity conditions.
    """
    d = A.shape[1]
    nb = len(blocks)
    AtA = A.T @ A
    masks = []
    for idx in blocks:
        m = np.zeros(d)
        m[idx] = 1.0
        masks.append(m)

    def inner(mu):
        diag = rho + sum(mu[j] * masks[j] for j in range(nb))
        root = np.sqrt(diag)
        Aa = np.vstack([A, np.diag(root)])
        ba = np.concatenate([b, rho * zc / root])
        z, lam, it, ok, W = _cone_lsq(Aa, ba, G, max_iter, state["W"])
        state["W"] = W
        state["iters"] += it
        state["ok"] = state["ok"] and ok
        norms = np.array([np.linalg.norm(z[idx]) for idx in blocks])
        r = A @ z - b
        dz = z - zc
        phi = 0.5 * (r @ r + rho * (dz @ dz) + float(mu @ (norms ** 2 - radii ** 2)))
        return z, lam, W, norms, phi, diag

    def converged(mu, norms):
        over = norms > radii * (1 + 1e-13)
        slack = (mu > 0) & (np.abs(norms - radii) > 1e-11 * radii)
        return not (over.any() or slack.any())

    mu = mu0.copy()
    z, lam, W, norms, phi, diag = inner(mu)
    for _ in range(100):
        if converged(mu, norms):
            break
        g = 0.5 * (norms ** 2 - radii ** 2)
        free = np.flatnonzero((mu > 0) | (g > 0))
        N = _null_space(G[list(W)], d)
        M = N.T @ ((AtA + np.diag(diag)) @ N)
        Z = np.stack([masks[j] * z for j in range(nb)], axis=1)
        NZ = N.T @ Z
        H = -NZ.T @ np.linalg.solve(M, NZ) if N.shape[1] else np.zeros((nb, nb))
        Hf = H[np.ix_(free, free)]
        shift = 1e-12 * max(1.0, float(np.abs(Hf).max()))
        try:
            step = np.linalg.solve(Hf - shift * np.eye(len(free)), -g[free])
        except np.linalg.LinAlgError:
            step = g[free]
        t = 1.0
        accepted = False
        while t > 1e-10:
            trial = mu.copy()
            trial[free] = np.maximum(0.0, mu[free] + t * step)
            out = inner(trial)
            if out[4] >= phi + 1e-4 * float(g @ (trial - mu)) - 1e-15 * abs(phi):
                mu = trial
                z, lam, W, norms, phi, diag = out
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break

    # coordinate polish: each mu_j solves ||z_j(mu)|| = r_j with the others fixed;
    # the gap is continuous and nonincreasing in mu_j because rho > 0
    for _sweep in range(50):
        if converged(mu, norms):
            break
        for j in range(nb):
            trial = mu.copy()

            def gap(t, j=j):
                trial[j] = t
                return float(inner(trial)[3][j]) - radii[j]

            if gap(0.0) <= 0:
                trial[j] = 0.0
            else:
                hi = max(mu[j], rho) * 2.0
                for _ in range(200):
                    if gap(hi) <= 0:
                        break
                    hi *= 4.0
                else:
                    continue
                if gap(0.0) > 0:
                    trial[j] = brentq(gap, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
                else:
                    trial[j] = 0.0
            mu = trial.copy()
            z, lam, W, norms, phi, diag = inner(mu)
    return z, lam, mu, W, converged(mu, norms)


def solve_cls(p: ClsProblem, tol: Tolerances | None = None, max_iter: int = DEFAULT_MAX_ITER) -> SolveOutcome:
    """Globally minimize 0.5||Az-b||^2 over the feasible set of ``p``.

    Deterministic: identical inputs give bit-identical outcomes.  When the
    iteration budget runs out the best feasible iterate is returned with
    status ``budget_exhausted``.
    """
    blocks = [idx for idx, _ in p.ball_blocks]
    radii = [r for _, r in p.ball_blocks]
    return solve_cone_lsq(p.design, p.target, p.le_matrix, blocks, radii, tol, max_iter)


# -- linear feasibility -------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    point: np.ndarray | None
    message: str = ""


def solve_linear_feasibility(equalities: Sequence, inequalities: Sequence = (), dim: int | None = None,
                             tol: float = 1e-9) -> FeasibilityResult:
    """Find w with v.w = rhs for every equality and v.w (<= or >=) rhs for every inequality.

    Inequalities are ``(v, sense)`` for homogeneous constraints or
    ``(v, sense, rhs)``.  Among feasible points the one of least l1 norm is
    returned (this keeps unconstrained coordinates at zero).  Infeasibility is
    reported by the LP solver's phase one.
    """
    vecs = [np.asarray(e[0], dtype=float).reshape(-1) for e in equalities]
    vecs += [np.asarray(c[0], dtype=float).reshape(-1) for c in inequalities]
    if dim is None:
        if not vecs:
            raise ValueError("cannot infer the dimension of an empty system")
        dim = vecs[0].shape[0]
    if any(v.shape[0] != dim for v in vecs):
        raise ValueError("all constraint vectors must have the same length")
    A_eq = np.array([np.asarray(v, float) for v, _ in equalities]).reshape(-1, dim)
    b_eq = np.array([float(r) for _, r in equalities])
    ub_rows, ub_rhs = [], []
    for c in inequalities:
        v, sense = np.asarray(c[0], float), c[1]
        rhs = float(c[2]) if len(c) > 2 else 0.0
        s = _sense_sign(sense)
        ub_rows.append(s * v)
        ub_rhs.append(s * rhs)
    A_ub = np.array(ub_rows).reshape(-1, dim)
    b_ub = np.array(ub_rhs)

    # w = w_plus - w_minus, minimize the l1 norm
    cost = np.ones(2 * dim)
    split = lambda M: np.hstack([M, -M])
    res = linprog(cost,
                  A_ub=split(A_ub) if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                  A_eq=split(A_eq) if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
                  bounds=[(0, None)] * (2 * dim), method="highs")
    if res.status == 2:
        return FeasibilityResult(False, None, "infeasible")
    if res.status != 0:
        return FeasibilityResult(False, None, f"LP solver status {res.status}: {res.message}")
    w = res.x[:dim] - res.x[dim:]
    w = _polish(w, A_eq, b_eq, A_ub, b_ub)
    eq_err = np.max(np.abs(A_eq @ w - b_eq)) if len(b_eq) else 0.0
    ub_err = max(0.0, np.max(A_ub @ w - b_ub)) if len(b_ub) else 0.0
    if max(eq_err, ub_err) > tol:
        return FeasibilityResult(False, w, f"residual {max(eq_err, ub_err):.3g} above tolerance")
    return FeasibilityResult(True, w, "feasible")


def _polish(w, A_eq, b_eq, A_ub, b_ub):
    """Snap an LP point onto its active constraints by a minimum-norm correction."""
    active = np.flatnonzero(np.abs(A_ub @ w - b_ub) <= 1e-7) if len(b_ub) else np.array([], int)
    E = np.vstack([A_eq, A_ub[active]])
    r = np.concatenate([b_eq, b_ub[active]])
    if E.shape[0] == 0:
        return w
    w2 = w + np.linalg.lstsq(E, r - E @ w, rcond=None)[0]
    err = lambda x: max(np.max(np.abs(A_eq @ x - b_eq)) if len(b_eq) else 0.0,
                        max(0.0, np.max(A_ub @ x - b_ub)) if len(b_ub) else 0.0)
    return w2 if err(w2) <= err(w) else w
