"""The common result type of every generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import Dataset


class NonPositiveGap(Exception):
    """The soundness gap of a reduction is not positive at this instance size."""

    def __init__(self, gap: float, output: "ReductionOutput | None" = None):
        self.gap = gap
        self.output = output
        super().__init__(f"soundness gap epsilon = {gap!r} is not positive at this instance size")


def _finite(obj, path="params"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _finite(v, f"{path}[{i}]")
    elif isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        raise ValueError(f"{path} is not finite")


@dataclass
class ReductionOutput:
    """A generated dataset with its constants, certificate and witness inputs.

    ``certificate`` holds the closed-form completeness value under ``opt``
    and, where the construction defines them, ``gap`` and
    ``soundness_bound``.  ``witness_recipe`` holds what is needed to turn a
    combinatorial solution into a network.
    """

    dataset: Dataset
    kind: str
    params: dict
    certificate: dict
    witness_recipe: dict = field(default_factory=dict)

    def __post_init__(self):
        _finite(self.params)
        _finite(self.certificate, "certificate")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dataset": self.dataset.to_dict(),
            "params": self.params,
            "certificate": self.certificate,
            "witness_recipe": self.witness_recipe,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReductionOutput":
        for key in ("kind", "dataset", "params", "certificate"):
            if key not in d:
                raise ValueError(f"reduction JSON is missing field '{key}'")
        return cls(Dataset.from_dict(d["dataset"]), d["kind"], d["params"], d["certificate"],
                   d.get("witness_recipe") or {})
