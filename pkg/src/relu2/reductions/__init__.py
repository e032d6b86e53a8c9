"""Hardness-instance generators with certificates and witness builders."""

from __future__ import annotations

import numpy as np

from ..core import Dataset, ReluNetwork
from .coloring import coloring_witness, lift_coloring, pad_coloring, reduce_coloring, soundness_bound
from .dks import dks_constants, dks_loss_parts, dks_witness, dks_witness_parts, reduce_dks
from .gadget import (GeneralPositionError, audit_general_position, build_gadget, compose_with_gadget,
                     compose_witness, compute_tau, gadget_point_sets, gadget_witness,
                     generate_general_position)
from .instances import Gate, Graph, Hypergraph, MonotoneCircuit, SetCoverInstance, cycle_graph
from .output import NonPositiveGap, ReductionOutput
from .setcover import (mmcs_total_error, mmcs_witness, reduce_mmcs, reduce_set_cover, setcover_loss,
                       setcover_witness)

KINDS = ("setcover", "mmcs", "dks", "coloring", "gadget", "compose")


def _stand_in(recipe: dict) -> ReductionOutput:
    """Rebuild enough of a nested ReductionOutput to call its witness builder."""
    data = Dataset(np.zeros((1, recipe["dim"])), [0.0])
    return ReductionOutput(data, recipe["kind"], recipe["params"], recipe["certificate"],
                           recipe["witness_recipe"])


def build_witness(out: ReductionOutput, solution) -> ReluNetwork:
    """Turn a combinatorial solution into the construction's witness network.

    Solutions: setcover a list of subset indices; mmcs an input assignment;
    dks a vertex set; coloring a color per vertex; gadget None; compose the
    base solution.
    """
    kind = out.kind
    if kind == "setcover":
        return setcover_witness(out, _index_list(solution, "cover"))
    if kind == "mmcs":
        return mmcs_witness(out, _index_list(solution, "assignment"))
    if kind == "dks":
        return dks_witness(out, _index_list(solution, "vertex set"))
    if kind == "coloring":
        return coloring_witness(out, _index_list(solution, "coloring"))
    if kind == "gadget":
        return gadget_witness(out)
    if kind == "compose":
        rec = out.witness_recipe
        g = _stand_in(rec["gadget"])
        gnet = gadget_witness(g)
        if rec["base"] is None:
            if solution is None:
                raise ValueError("a composed plain dataset needs its base witness network as the solution")
            base_net = solution if isinstance(solution, ReluNetwork) else ReluNetwork.from_dict(solution)
        else:
            base_net = build_witness(_stand_in(rec["base"]), solution)
        return compose_witness(base_net, gnet)
    raise ValueError(f"unknown reduction kind {kind!r}")


def completeness_value(out: ReductionOutput, solution) -> float:
    """The average loss the witness of ``solution`` is certified to reach."""
    kind = out.kind
    if kind == "setcover":
        return setcover_loss(out, len(set(_index_list(solution, "cover"))))
    if kind == "mmcs":
        return mmcs_total_error(out, sum(1 for v in solution if v)) / out.params["m"]
    if kind == "dks":
        inst = out.witness_recipe.get("instance")
        if inst is None:
            raise ValueError("instance too large to recount induced edges")
        ell = Hypergraph.from_dict(inst).induced_edges(_index_list(solution, "vertex set"))
        return dks_witness_parts(out, ell)["total"]
    if kind in ("coloring", "gadget"):
        return 0.0
    if kind == "compose":
        base = out.witness_recipe["base"]
        if base is None:
            return 0.0
        # base rows carry half the weight and halved labels
        return completeness_value(_stand_in(base), solution) / 8.0
    raise ValueError(f"unknown reduction kind {kind!r}")


def _index_list(solution, what: str) -> list:
    if solution is None or isinstance(solution, (str, bytes)):
        raise ValueError(f"expected a {what} given as a list of integers")
    try:
        return [int(v) for v in solution]
    except (TypeError, ValueError):
        raise ValueError(f"expected a {what} given as a list of integers") from None


__all__ = [
    "KINDS", "Gate", "GeneralPositionError", "Graph", "Hypergraph", "MonotoneCircuit", "NonPositiveGap",
    "ReductionOutput", "SetCoverInstance", "audit_general_position", "build_gadget", "build_witness",
    "coloring_witness", "completeness_value", "compose_with_gadget", "compose_witness", "compute_tau",
    "cycle_graph", "dks_constants", "dks_loss_parts", "dks_witness", "dks_witness_parts",
    "gadget_point_sets", "gadget_witness", "generate_general_position", "lift_coloring",
    "mmcs_total_error", "mmcs_witness", "pad_coloring", "reduce_coloring", "reduce_dks", "reduce_mmcs",
    "reduce_set_cover", "setcover_loss", "setcover_witness", "soundness_bound",
]
