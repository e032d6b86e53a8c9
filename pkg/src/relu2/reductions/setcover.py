"""Single-ReLU hardness constructions from Set Cover and monotone circuit satisfiability.

Each labelled sample (x, y) reads as a constraint relu(<w, x>) = y on the
unknown weight vector, so coordinates of w play the role of variables.
"""

from __future__ import annotations

import numpy as np

from ..core import Dataset, ReluNetwork
from .instances import MonotoneCircuit, SetCoverInstance
from .output import ReductionOutput


def reduce_set_cover(inst: SetCoverInstance) -> ReductionOutput:
    """Samples whose best single-ReLU loss is gamma^2 * t / |S| for the smallest cover size t.

    Coordinates: one per subset, then the constant coordinate, then the
    gamma coordinate.  Per element u: e_one + sum of e_T over subsets T
    containing u, label 0.  Per subset T: e_gamma + e_T, label gamma.
    Plus (e_one, 1) and (e_gamma, gamma).
    """
    missing = inst.uncovered()
    if missing:
        raise ValueError(f"elements {missing} lie in no subset, so no cover exists")
    M = inst.M
    n = M + 2
    one, gam = M, M + 1
    gamma = 0.01 / M ** 2
    rows, labels = [], []
    for u in range(1, inst.universe_size + 1):
        x = np.zeros(n)
        x[one] = 1.0
        for i, T in enumerate(inst.subsets):
            if u in T:
                x[i] = 1.0
        rows.append(x)
        labels.append(0.0)
    for i in range(M):
        x = np.zeros(n)
        x[gam] = 1.0
        x[i] = 1.0
        rows.append(x)
        labels.append(gamma)
    for coord, label in ((one, 1.0), (gam, gamma)):
        x = np.zeros(n)
        x[coord] = 1.0
        rows.append(x)
        labels.append(label)
    m = len(rows)
    data = Dataset(np.array(rows), labels, meta={"kind": "setcover"})
    return ReductionOutput(
        data, "setcover",
        params={"gamma": gamma, "M": M, "universe": inst.universe_size, "n": n, "m": m},
        certificate={"mode": "completeness", "loss_per_cover_set": gamma ** 2 / m,
                     "formula": "gamma^2 * t / |S|"},
        witness_recipe={"instance": inst.to_dict(), "one_coord": one, "gamma_coord": gam},
    )


def setcover_witness(out: ReductionOutput, cover) -> ReluNetwork:
    """w_T = -1 on the chosen subsets, w_one = 1, w_gamma = gamma, zero elsewhere."""
    inst = SetCoverInstance.from_dict(out.witness_recipe["instance"])
    if not inst.is_cover(cover):
        raise ValueError(f"subsets {sorted(cover)} do not cover the universe")
    w = np.zeros(out.dataset.dim)
    w[list(cover)] = -1.0
    w[out.witness_recipe["one_coord"]] = 1.0
    w[out.witness_recipe["gamma_coord"]] = out.params["gamma"]
    return ReluNetwork(w[None, :], [1.0])


def setcover_loss(out: ReductionOutput, cover_size: int) -> float:
    return out.params["gamma"] ** 2 * cover_size / out.params["m"]


def reduce_mmcs(circuit: MonotoneCircuit) -> ReductionOutput:
    """Samples whose minimum TOTAL squared error is OPT * gamma^2, OPT the fewest true inputs.

    Coordinates are the wires followed by a gamma coordinate, with
    gamma = 1 / (10 |C|)^(depth + 1).
    """
    C = circuit.wire_count
    depth = circuit.depth
    n = C + 1
    g = C
    gamma = 1.0 / (10.0 * C) ** (depth + 1)
    rows, labels = [], []

    def add(entries, label):
        x = np.zeros(n)
        for idx, val in entries:
            x[idx] += val
        rows.append(x)
        labels.append(label)

    add([(g, 1.0)], gamma)
    for i in range(circuit.num_inputs):
        add([(g, 1.0), (i, -1.0)], gamma)
    add([(circuit.output_wire, 1.0)], 1.0)
    for g_idx, gate in enumerate(circuit.gates):
        j = circuit.num_inputs + g_idx
        if gate.op == "OR":
            add([(j, 1.0)] + [(i, -1.0) for i in gate.inputs], 0.0)
        else:
            for i in gate.inputs:
                add([(j, 1.0), (i, -1.0)], 0.0)
    m = len(rows)
    data = Dataset(np.array(rows), labels, meta={"kind": "mmcs"})
    return ReductionOutput(
        data, "mmcs",
        params={"gamma": gamma, "wires": C, "depth": depth, "n": n, "m": m},
        certificate={"mode": "completeness", "error_convention": "total",
                     "total_error_per_true_input": gamma ** 2,
                     "average_error_per_true_input": gamma ** 2 / m,
                     "formula": "total = OPT * gamma^2, average = total / m"},
        witness_recipe={"instance": circuit.to_dict(), "gamma_coord": g},
    )


def mmcs_witness(out: ReductionOutput, assignment) -> ReluNetwork:
    """w_j = 1 on wires that evaluate true, 0 otherwise, w_gamma = gamma."""
    circuit = MonotoneCircuit.from_dict(out.witness_recipe["instance"])
    vals = circuit.evaluate(assignment)
    if not vals[circuit.output_wire]:
        raise ValueError("assignment does not make the output true")
    w = np.zeros(out.dataset.dim)
    w[: circuit.wire_count] = np.array(vals, dtype=float)
    w[out.witness_recipe["gamma_coord"]] = out.params["gamma"]
    return ReluNetwork(w[None, :], [1.0])


def mmcs_total_error(out: ReductionOutput, true_inputs: int) -> float:
    return true_inputs * out.params["gamma"] ** 2
