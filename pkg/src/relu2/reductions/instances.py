"""Combinatorial source instances and their JSON formats."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe {1..universe_size} and a family of subsets of it."""

    universe_size: int
    subsets: tuple

    def __post_init__(self):
        subs = tuple(tuple(sorted(set(int(e) for e in s))) for s in self.subsets)
        if self.universe_size < 1:
            raise ValueError("universe must be non-empty")
        if not subs:
            raise ValueError("need at least one subset")
        for i, s in enumerate(subs):
            bad = [e for e in s if not 1 <= e <= self.universe_size]
            if bad:
                raise ValueError(f"subsets[{i}] has elements {bad} outside 1..{self.universe_size}")
        object.__setattr__(self, "subsets", subs)

    @property
    def M(self) -> int:
        return len(self.subsets)

    def uncovered(self) -> list[int]:
        covered = set().union(*map(set, self.subsets))
        return [u for u in range(1, self.universe_size + 1) if u not in covered]

    def is_cover(self, chosen) -> bool:
        got = set()
        for i in chosen:
            got |= set(self.subsets[i])
        return len(got) == self.universe_size

    def min_cover(self) -> tuple | None:
        """Smallest cover by exhaustive search (subset indices), or None if none exists."""
        if self.M > 20:
            raise ValueError("exhaustive cover search is limited to 20 subsets")
        for t in range(1, self.M + 1):
            for chosen in itertools.combinations(range(self.M), t):
                if self.is_cover(chosen):
                    return chosen
        return None

    def to_dict(self) -> dict:
        return {"universe": self.universe_size, "subsets": [list(s) for s in self.subsets]}

    @classmethod
    def from_dict(cls, d: dict) -> "SetCoverInstance":
        try:
            return cls(int(d["universe"]), tuple(d["subsets"]))
        except KeyError as exc:
            raise ValueError(f"set cover JSON is missing field {exc}") from None


@dataclass(frozen=True)
class Gate:
    op: str
    inputs: tuple

    def __post_init__(self):
        op = str(self.op).upper()
        if op not in ("AND", "OR"):
            raise ValueError(f"gate op must be AND or OR, got {self.op!r}")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))


@dataclass(frozen=True)
class MonotoneCircuit:
    """Inputs are wires 0..num_inputs-1; gate g drives wire num_inputs + g."""

    num_inputs: int
    gates: tuple
    output_wire: int

    def __post_init__(self):
        gates = tuple(g if isinstance(g, Gate) else Gate(g["op"], g["in"]) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        if self.num_inputs < 1:
            raise ValueError("circuit needs at least one input wire")
        for g_idx, g in enumerate(gates):
            wire = self.num_inputs + g_idx
            if not g.inputs:
                raise ValueError(f"gates[{g_idx}] has no inputs")
            for i in g.inputs:
                if not 0 <= i < wire:
                    raise ValueError(f"gates[{g_idx}] reads wire {i}, which is not an earlier wire")
        if not 0 <= self.output_wire < self.wire_count:
            raise ValueError(f"output wire {self.output_wire} does not exist")

    @property
    def wire_count(self) -> int:
        return self.num_inputs + len(self.gates)

    @property
    def depth(self) -> int:
        h = [0] * self.wire_count
        for g_idx, g in enumerate(self.gates):
            h[self.num_inputs + g_idx] = 1 + max(h[i] for i in g.inputs)
        return max(h)

    def evaluate(self, assignment) -> list[bool]:
        vals = [bool(v) for v in assignment]
        if len(vals) != self.num_inputs:
            raise ValueError("assignment length must equal the number of inputs")
        for g in self.gates:
            xs = [vals[i] for i in g.inputs]
            vals.append(all(xs) if g.op == "AND" else any(xs))
        return vals

    def min_true_inputs(self) -> tuple[int, tuple]:
        """Minimum number of true inputs that make the output true, with an optimal assignment."""
        if self.num_inputs > 22:
            raise ValueError("exhaustive search is limited to 22 inputs")
        best = None
        for bits in itertools.product((0, 1), repeat=self.num_inputs):
            if self.evaluate(bits)[self.output_wire]:
                if best is None or sum(bits) < sum(best):
                    best = bits
        return sum(best), best

    def to_dict(self) -> dict:
        return {"inputs": self.num_inputs,
                "gates": [{"op": g.op, "in": list(g.inputs)} for g in self.gates],
                "output": self.output_wire}

    @classmethod
    def from_dict(cls, d: dict) -> "MonotoneCircuit":
        try:
            gates = []
            for i, g in enumerate(d["gates"]):
                if "op" not in g or "in" not in g:
                    raise ValueError(f"circuit JSON: gates[{i}] needs 'op' and 'in'")
                gates.append(Gate(g["op"], g["in"]))
            return cls(int(d["inputs"]), tuple(gates), int(d["output"]))
        except KeyError as exc:
            raise ValueError(f"circuit JSON is missing field {exc}") from None


@dataclass(frozen=True)
class Hypergraph:
    """Vertices 0..n-1 and hyperedges as vertex tuples; a graph has only 2-edges."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("hypergraph needs at least one vertex")
        edges = []
        seen = set()
        for i, e in enumerate(self.edges):
            e = tuple(int(v) for v in e)
            if len(set(e)) != len(e):
                raise ValueError(f"edges[{i}] repeats a vertex (self-loop)")
            if len(e) < 2:
                raise ValueError(f"edges[{i}] has fewer than two vertices")
            bad = [v for v in e if not 0 <= v < self.n]
            if bad:
                raise ValueError(f"edges[{i}] has vertices {bad} outside 0..{self.n - 1}")
            key = tuple(sorted(e))
            if key in seen:
                raise ValueError(f"edges[{i}] duplicates an earlier edge")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def N(self) -> int:
        return self.n

    @property
    def M(self) -> int:
        return len(self.edges)

    @property
    def max_edge_size(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees())

    @property
    def is_graph(self) -> bool:
        return all(len(e) == 2 for e in self.edges)

    def monochromatic(self, coloring) -> int:
        return sum(1 for e in self.edges if len({coloring[v] for v in e}) == 1)

    def min_monochromatic_fraction(self, k: int, cap: int = 2_000_000) -> tuple[float, tuple]:
        """Least fraction of monochromatic edges over all k-colorings (exhaustive)."""
        if k ** self.n > cap:
            raise ValueError(f"{k}^{self.n} colorings exceed the search cap")
        best, arg = None, None
        for col in itertools.product(range(k), repeat=self.n):
            # fixing vertex 0's color loses nothing by symmetry
            if col[0] != 0:
                continue
            c = self.monochromatic(col)
            if best is None or c < best:
                best, arg = c, col
                if c == 0:
                    break
        return best / max(self.M, 1), arg

    def induced_edges(self, vertices) -> int:
        s = set(vertices)
        return sum(1 for e in self.edges if set(e) <= s)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, d: dict) -> "Hypergraph":
        try:
            return cls(int(d["n"]), tuple(d["edges"]))
        except KeyError as exc:
            raise ValueError(f"graph JSON is missing field {exc}") from None


Graph = Hypergraph


def cycle_graph(n: int) -> Hypergraph:
    return Hypergraph(n, tuple((i, (i + 1) % n) for i in range(n)))
