"""Global k-ReLU training by enumerating coefficient vectors and sign patterns.

Fixing the coefficient vector a and, for every (sample, unit) pair, whether
the unit is active turns the squared loss into a convex least-squares
problem over a polyhedral cone: active terms contribute a_j <w^j, x_i>
subject to <w^j, x_i> >= 0, inactive ones contribute nothing subject to
<w^j, x_i> <= 0.  The best of all these convex problems is the global
optimum.

Three exact reductions keep the enumeration small:

* samples sharing a feature vector are merged into one weighted sample
  at the weighted-mean label (the spread around the mean is a constant);
* per unit, only sign vectors of full-dimensional cells of the hyperplane
  arrangement {w : <w, x_i> = 0} are visited, since every weight vector
  lies in the closure of such a cell;
* units with equal coefficients are interchangeable, so their columns
  are taken in nondecreasing order, and when the coefficients are free
  only sorted coefficient vectors are tried.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..core import Dataset, ReluNetwork, Tolerances, eval_loss
from ..solver import OPTIMAL, BUDGET_EXHAUSTED, DEFAULT_MAX_ITER, solve_cone_lsq

DEFAULT_ENUM_CAP = 24


class EnumerationCapExceeded(Exception):
    """The requested enumeration needs more than the configured budget."""

    def __init__(self, required_bits: int, cap: int, subproblems: int):
        self.required_bits = required_bits
        self.cap = cap
        self.subproblems = subproblems
        super().__init__(
            f"enumeration needs m*k = {required_bits} pattern bits "
            f"(up to {subproblems} subproblems) but the cap is {cap} bits"
        )


@dataclass(frozen=True)
class SignPattern:
    """``bits[i, j] == 1`` iff unit j is taken as active on sample i."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.bits, dtype=np.uint8))
        if not np.all(b <= 1):
            raise ValueError("sign pattern entries must be 0 or 1")
        object.__setattr__(self, "bits", b)

    @property
    def shape(self):
        return self.bits.shape

    def to_bitstring(self) -> str:
        """Row-major bits: sample 0's units first."""
        return "".join(str(int(v)) for v in self.bits.ravel())

    def as_int(self) -> int:
        s = self.to_bitstring()
        return int(s, 2) if s else 0

    @classmethod
    def from_bitstring(cls, s: str, m: int, k: int) -> "SignPattern":
        if len(s) != m * k or set(s) - {"0", "1"}:
            raise ValueError(f"pattern must be {m * k} characters of 0/1")
        return cls(np.array([int(c) for c in s], dtype=np.uint8).reshape(m, k))

    def consistent_with(self, net: ReluNetwork, X, atol: float = 1e-9) -> bool:
        """Check every active bit has pre-activation >= -atol and every inactive one <= atol."""
        pre = np.asarray(X @ net.unit_weights.T)
        on = self.bits.astype(bool)
        return bool(np.all(pre[on] >= -atol) and np.all(pre[~on] <= atol))


@dataclass(frozen=True)
class TrainOptions:
    bounded: bool = False
    fixed_coeffs: tuple | None = None
    tie_break: str = "lexicographic"
    threads: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)
    enum_cap: int = DEFAULT_ENUM_CAP
    symmetry_pruning: bool = True
    cell_pruning: bool = True
    max_solver_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.fixed_coeffs is not None:
            fc = tuple(int(c) for c in self.fixed_coeffs)
            if any(c not in (-1, 1) for c in fc):
                raise ValueError("fixed coefficients must be -1 or +1")
            object.__setattr__(self, "fixed_coeffs", fc)
        if self.tie_break != "lexicographic":
            raise ValueError("only lexicographic tie-breaking is supported")
        if self.threads < 1:
            raise ValueError("thread budget must be at least 1")


@dataclass(frozen=True)
class TrainResult:
    network: ReluNetwork
    loss: float
    pattern: SignPattern
    coeff_vector: tuple
    objective: float = float("nan")
    subproblems: int = 0
    status: str = OPTIMAL

    def to_dict(self) -> dict:
        return {
            "loss": self.loss,
            "network": self.network.to_dict(),
            "pattern": self.pattern.to_bitstring(),
            "coeffs": [int(c) for c in self.coeff_vector],
            "objective": self.objective,
            "subproblems": self.subproblems,
            "status": self.status,
        }


# -- preprocessing -------------------------------------------------------------

@dataclass
class _Collapsed:
    X: np.ndarray          # distinct nonzero feature rows
    y: np.ndarray          # weighted-mean labels
    w: np.ndarray          # summed weights
    offset: float          # weighted squared spread plus zero-row terms
    group: np.ndarray      # original row -> collapsed row, -1 for zero rows
    total: float


def collapse_samples(data: Dataset) -> _Collapsed:
    """Merge rows with identical features and set aside all-zero rows."""
    X = data.dense_X()
    index = {}
    group = np.empty(data.m, dtype=int)
    for i in range(data.m):
        key = X[i].tobytes()
        group[i] = index.setdefault(key, len(index))
    G = len(index)
    W = np.bincount(group, weights=data.weights, minlength=G)
    ybar = np.bincount(group, weights=data.weights * data.y, minlength=G) / W
    spread = float(np.sum(data.weights * (data.y - ybar[group]) ** 2))
    first = np.array([np.flatnonzero(group == g)[0] for g in range(G)])
    Xg = X[first]
    zero = ~np.any(Xg != 0, axis=1)
    offset = spread + float(np.sum(W[zero] * ybar[zero] ** 2))
    keep = np.flatnonzero(~zero)
    remap = -np.ones(G, dtype=int)
    remap[keep] = np.arange(keep.size)
    return _Collapsed(Xg[keep], ybar[keep], W[keep], offset, remap[group], data.total_weight)


def arrangement_cells(X: np.ndarray) -> list[tuple]:
    """Sign vectors of the full-dimensional cells cut out by the hyperplanes x_i . w = 0.

    Bit 1 means x_i . w > 0 inside the cell.  Cells are grown one sample at
    a time; the parent's interior point decides one child for free and an
    LP (sigma_t x_t . w >= 1) decides the other.
    """
    m, n = X.shape
    cells = [((), np.zeros(n))]
    for i in range(m):
        nxt = []
        for bits, w in cells:
            v = float(X[i] @ w) if bits else 0.0
            children = []
            for s in (0, 1):
                if (s == 1 and v > 0) or (s == 0 and v < 0):
                    children.append((bits + (s,), w))
                    continue
                sig = np.array([2 * t - 1 for t in bits + (s,)], dtype=float)
                A_ub = -sig[:, None] * X[: i + 1]
                res = linprog(np.zeros(n), A_ub=A_ub, b_ub=-np.ones(i + 1),
                              bounds=[(None, None)] * n, method="highs")
                if res.status == 0:
                    children.append((bits + (s,), res.x))
            nxt.extend(children)
        cells = nxt
    return sorted(bits for bits, _ in cells)


def _coeff_vectors(k: int, opts: TrainOptions) -> list[tuple]:
    if opts.fixed_coeffs is not None:
        if len(opts.fixed_coeffs) != k:
            raise ValueError(f"fixed coefficients have length {len(opts.fixed_coeffs)}, expected k={k}")
        return [opts.fixed_coeffs]
    vecs = list(itertools.product((-1, 1), repeat=k))
    if opts.symmetry_pruning:
        vecs = [a for a in vecs if list(a) == sorted(a)]
    return vecs


def _pattern_int(columns: tuple, cells: list, m: int, k: int) -> int:
    v = 0
    for i in range(m):
        for j in range(k):
            v = (v << 1) | cells[columns[j]][i]
    return v


def _candidates(a: tuple, cells: list, m: int, k: int, symmetric: bool) -> list[tuple]:
    """Column-index tuples for coefficient vector ``a`` in ascending pattern order."""
    out = []
    for cols in itertools.product(range(len(cells)), repeat=k):
        if symmetric and any(a[j] == a[j2] and cells[cols[j]] > cells[cols[j2]]
                             for j in range(k) for j2 in range(j + 1, k)):
            continue
        out.append((_pattern_int(cols, cells, m, k), cols))
    out.sort()
    return [c for _, c in out]


# -- subproblem construction ---------------------------------------------------

class _Builder:
    def __init__(self, col: _Collapsed, k: int):
        m, n = col.X.shape
        self.m, self.n, self.k = m, n, k
        blk = np.zeros((m, k, k * n))
        for j in range(k):
            blk[:, j, j * n:(j + 1) * n] = col.X
        self.blk = blk
        self.sw = np.sqrt(col.w)
        self.b = self.sw * col.y
        self.offset = col.offset
        self.total = col.total
        self.blocks = [np.arange(j * n, (j + 1) * n) for j in range(k)]

    def build(self, a, bits):
        S = np.asarray(bits, dtype=float)
        A = self.sw[:, None] * np.einsum("ij,ijd->id", S * np.asarray(a, float)[None, :], self.blk)
        sgn = 2.0 * S - 1.0
        G = -(sgn[:, :, None] * self.blk).reshape(self.m * self.k, -1)
        return A, G

    def loss(self, objective: float) -> float:
        return (2.0 * objective + self.offset) / self.total

    def solve(self, a, bits, bounded, tol, max_iter):
        """Return (loss, z, status, relaxed_lower_bound_only)."""
        A, G = self.build(a, bits)
        out = solve_cone_lsq(A, self.b, G, tol=tol, max_iter=max_iter)
        if bounded:
            norms = [np.linalg.norm(out.z_star[idx]) for idx in self.blocks]
            if max(norms) > 1.0:
                return self.loss(out.objective), out.z_star, out.status, True
        return self.loss(out.objective), out.z_star, out.status, False

    def solve_bounded(self, a, bits, tol, max_iter):
        A, G = self.build(a, bits)
        out = solve_cone_lsq(A, self.b, G, self.blocks, [1.0] * self.k, tol=tol, max_iter=max_iter)
        return self.loss(out.objective), out.z_star, out.status


_WORKER = {}


def _worker_init(builder, bounded, tol, max_iter):
    _WORKER.update(builder=builder, bounded=bounded, tol=tol, max_iter=max_iter)


def _worker_solve(job):
    a, bits = job
    w = _WORKER
    loss, z, status, relaxed = w["builder"].solve(a, bits, w["bounded"], w["tol"], w["max_iter"])
    return loss, z, status, relaxed


# -- driver --------------------------------------------------------------------

def train_exact(data: Dataset, k: int, opts: TrainOptions | None = None) -> TrainResult:
    """Globally minimize the weighted squared loss over k-ReLU networks.

    Raises EnumerationCapExceeded when the collapsed sample count times k
    exceeds ``opts.enum_cap``.  Ties are resolved in favour of the first
    candidate in (coefficient vector, pattern integer) order.
    """
    opts = opts or TrainOptions()
    if k < 1:
        raise ValueError("k must be positive")
    tol = opts.tolerances
    col = collapse_samples(data)
    m, n = col.X.shape
    coeff_vecs = _coeff_vectors(k, opts)
    if m * k > opts.enum_cap:
        raise EnumerationCapExceeded(m * k, opts.enum_cap, len(coeff_vecs) * 2 ** (m * k))

    def expand(bits_c):
        full = np.ones((data.m, k), dtype=np.uint8)
        mask = col.group >= 0
        if m:
            full[mask] = np.asarray(bits_c, dtype=np.uint8)[col.group[mask]]
        return SignPattern(full)

    if m == 0:
        net = ReluNetwork(np.zeros((k, data.dim)), coeff_vecs[0])
        return TrainResult(net, eval_loss(net, data), expand(np.zeros((0, k))), coeff_vecs[0],
                           col.offset / col.total, 0)

    if opts.cell_pruning:
        cells = arrangement_cells(col.X)
    else:
        cells = sorted(itertools.product((0, 1), repeat=m))
    builder = _Builder(col, k)

    jobs = []
    for a in coeff_vecs:
        for cols in _candidates(a, cells, m, k, opts.symmetry_pruning):
            bits = np.array([cells[c] for c in cols], dtype=np.uint8).T
            jobs.append((a, bits))

    threads = max(1, int(opts.threads))
    if threads == 1 or len(jobs) < 64:
        _worker_init(builder, opts.bounded, tol, opts.max_solver_iter)
        results = map(_worker_solve, jobs)
    else:
        pool = ProcessPoolExecutor(threads, initializer=_worker_init,
                                   initargs=(builder, opts.bounded, tol, opts.max_solver_iter))
        results = pool.map(_worker_solve, jobs, chunksize=max(1, len(jobs) // (8 * threads)))

    scale = float(np.sum(data.weights * data.y ** 2) / data.total_weight)
    eps = 1e-12 * max(scale, 1e-300)
    best = None
    status = OPTIMAL
    try:
        for (a, bits), (loss, z, st, relaxed) in zip(jobs, results):
            if relaxed:
                # the unbounded optimum is a lower bound for the ball-constrained one
                if best is not None and loss >= best[0] - eps:
                    continue
                loss, z, st = builder.solve_bounded(a, bits, tol, opts.max_solver_iter)
            if st != OPTIMAL:
                status = BUDGET_EXHAUSTED
            if best is None or loss < best[0] - eps:
                best = (loss, z, a, bits)
    finally:
        if threads > 1 and len(jobs) >= 64:
            pool.shutdown()

    loss, z, a, bits = best
    net = ReluNetwork(z.reshape(k, n), a)
    return TrainResult(net, eval_loss(net, data), expand(bits), tuple(int(c) for c in a),
                       loss, len(jobs), status)


def threads_from_env(default: int = 1) -> int:
    v = os.environ.get("RELU2_THREADS")
    if v is None:
        return default
    try:
        t = int(v)
    except ValueError:
        raise ValueError(f"RELU2_THREADS must be a positive integer, got {v!r}") from None
    if t < 1:
        raise ValueError("RELU2_THREADS must be at least 1")
    return t
