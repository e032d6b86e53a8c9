"""Command-line entry point: generate, train, verify, complexity, oracle.

Exit codes: 0 success, 1 input error, 2 non-positive soundness gap,
3 enumeration budget exceeded, 4 unverifiable at this scale, 5 a check or
certificate did not hold.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .core import Dataset, Tolerances, dumps, eval_loss, read_json
from .learning import (LearnParams, generalization_gap_bound, rademacher_bound, sample_complexity_agnostic,
                       sample_complexity_realizable)
from .reductions import (KINDS, Hypergraph, MonotoneCircuit, NonPositiveGap, ReductionOutput,
                         SetCoverInstance, build_gadget, compose_with_gadget, pad_coloring, reduce_coloring,
                         reduce_dks, reduce_mmcs, reduce_set_cover)
from .trainer import (EnumerationCapExceeded, NotRealizable, TrainOptions, brute_force_oracle,
                      oracle_resolution_bound, train_epsnet, train_exact, train_realizable_1relu)
from .trainer.exact import threads_from_env
from .verify import FAIL, UNVERIFIABLE, VerifyReport, check_soundness_gap, check_witness, roundtrip_setcover

EXIT_OK, EXIT_INPUT, EXIT_GAP, EXIT_BUDGET, EXIT_UNVERIFIABLE, EXIT_FAILED = 0, 1, 2, 3, 4, 5


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit code 2 is reserved for the gap signal
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load(path: str):
    try:
        return read_json(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _emit(obj, out_path: str | None):
    text = dumps(obj)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coeffs(s: str | None):
    if s is None:
        return None
    try:
        vals = tuple(int(v) for v in s.split(","))
    except ValueError:
        raise InputError(f"--fix-coeffs expects comma-separated +1/-1 values, got {s!r}") from None
    if any(v not in (-1, 1) for v in vals):
        raise InputError("--fix-coeffs entries must be 1 or -1")
    return vals


def _load_dataset(path: str) -> tuple[Dataset, dict]:
    d = _load(path)
    if isinstance(d, dict) and "dataset" in d and "kind" in d:
        return Dataset.from_dict(d["dataset"]), d
    return Dataset.from_dict(d), {}


def _load_reduction(path: str) -> ReductionOutput:
    d = _load(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected a JSON object")
    return ReductionOutput.from_dict(d)


def _tolerances(args) -> Tolerances:
    return Tolerances(kkt_tol=args.kkt_tol, loss_tol=args.loss_tol, rank_tol=args.rank_tol)


def _threads(args) -> int:
    return threads_from_env(args.threads)


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    kind = args.reduction
    if kind not in ("gadget",) and not args.input:
        raise InputError(f"--in is required for --reduction {kind}")
    if kind in ("coloring", "gadget", "compose") and args.k is None:
        raise InputError(f"--k is required for --reduction {kind}")
    if kind == "setcover":
        out = reduce_set_cover(SetCoverInstance.from_dict(_load(args.input)))
    elif kind == "mmcs":
        out = reduce_mmcs(MonotoneCircuit.from_dict(_load(args.input)))
    elif kind == "dks":
        if args.kappa is None or args.ell is None:
            raise InputError("--kappa and --ell are required for --reduction dks")
        g = Hypergraph.from_dict(_load(args.input))
        try:
            out = reduce_dks(g, args.kappa, args.ell, allow_nonpositive_gap=args.allow_nonpositive_gap)
        except NonPositiveGap as exc:
            print(f"non-positive gap: epsilon = {exc.gap!r}", file=sys.stderr)
            return EXIT_GAP
    elif kind == "coloring":
        h = Hypergraph.from_dict(_load(args.input))
        if args.pad:
            h = pad_coloring(h, args.k)
        out = reduce_coloring(h, args.k)
    elif kind == "gadget":
        out = _gadget(args)
    else:
        d = _load(args.input)
        base = ReductionOutput.from_dict(d) if isinstance(d, dict) and "kind" in d else Dataset.from_dict(d)
        out = compose_with_gadget(base, args.k, _gadget(args))
    doc = out.to_dict()
    doc["meta"] = {"command": "generate", "reduction": kind, "seed": args.seed}
    _emit(doc, args.out)
    return EXIT_OK


def _gadget(args) -> ReductionOutput:
    return build_gadget(args.k, args.points_per_set, seed=args.seed, simple_pair=args.simple_pair,
                        method=args.method)


# -- train ------------------------------------------------------------------

def cmd_train(args) -> int:
    data, _ = _load_dataset(args.input)
    bounded = args.bounded or data.bounded
    fixed = _coeffs(args.fix_coeffs)
    t0 = time.perf_counter()
    try:
        if args.mode == "exact":
            opts = TrainOptions(bounded=bounded, fixed_coeffs=fixed, threads=_threads(args),
                                tolerances=_tolerances(args), enum_cap=args.enum_cap)
            res = train_exact(data, args.k, opts)
            doc = res.to_dict()
        elif args.mode == "epsnet":
            res = train_epsnet(data, args.k, args.net_spacing, seed=args.seed, fixed_coeffs=fixed)
            doc = res.to_dict()
        elif args.mode == "lp-realizable":
            if args.k != 1:
                raise InputError("lp-realizable mode trains a single ReLU; use --k 1")
            net = train_realizable_1relu(data)
            doc = {"loss": eval_loss(net, data), "network": net.to_dict(), "certificate": "realizable"}
        else:
            res = brute_force_oracle(data, args.k, args.grid_step, args.box_radius, fixed, bounded)
            doc = res.to_dict()
            doc["resolution_bound"] = oracle_resolution_bound(data, args.k, args.grid_step, res.loss)
    except EnumerationCapExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NotRealizable as exc:
        print(f"not realizable: {exc}", file=sys.stderr)
        return EXIT_FAILED
    elapsed = time.perf_counter() - t0
    doc["total_error"] = doc["loss"] * data.total_weight
    doc["meta"] = {"command": "train", "mode": args.mode, "k": args.k, "seed": args.seed}
    _emit(doc, args.out)
    print(f"loss {doc['loss']!r}  total error {doc['total_error']!r}  wall time {elapsed:.3f} s", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    args.mode = "oracle"
    return cmd_train(args)


# -- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.roundtrip_setcover:
        rep = roundtrip_setcover(SetCoverInstance.from_dict(_load(args.input)), tol=args.tol)
    else:
        out = _load_reduction(args.input)
        rep = VerifyReport()
        parts = []
        if args.solution or args.witness:
            sol = None
            if args.solution:
                sol = _load(args.solution)
                if isinstance(sol, dict):
                    sol = sol.get("solution")
            parts.append(check_witness(out, sol, tol=args.tol))
        if args.soundness or not parts:
            fixed = _coeffs(args.fix_coeffs)
            opts = None
            if fixed is not None:
                opts = TrainOptions(bounded=out.dataset.bounded, fixed_coeffs=fixed, threads=_threads(args))
            parts.append(check_soundness_gap(out, opts, tol=args.tol))
        for p in parts:
            rep.checks.extend(p.checks)
            if p.status == UNVERIFIABLE:
                rep.status = UNVERIFIABLE
        rep.note = "; ".join(p.note for p in parts if p.note)
        rep.finish()
    doc = rep.to_dict()
    doc["meta"] = {"command": "verify", "seed": args.seed}
    _emit(doc, args.out)
    if rep.status == UNVERIFIABLE:
        return EXIT_UNVERIFIABLE
    return EXIT_FAILED if rep.status == FAIL else EXIT_OK


# -- complexity -------------------------------------------------------------

def cmd_complexity(args) -> int:
    p = LearnParams(args.k, args.epsilon, args.delta, args.C)
    m_agn = sample_complexity_agnostic(p)
    doc = {
        "k": p.k, "epsilon": p.epsilon, "delta": p.delta, "C": p.C_smooth,
        "agnostic_m": m_agn,
        "realizable_m": sample_complexity_realizable(p),
        "rademacher_bound_at_agnostic_m": rademacher_bound(p.k, m_agn),
        "generalization_gap_bound_at_agnostic_m": generalization_gap_bound(p.k, m_agn, p.delta),
    }
    if args.m is not None:
        doc["generalization_gap_bound_at_m"] = generalization_gap_bound(p.k, args.m, p.delta)
    if args.json:
        _emit(doc, None)
    else:
        for key, val in doc.items():
            print(f"{key:40s} {val}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relu2", description="Exact depth-2 ReLU training and hardness instances.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_in=True):
        p.add_argument("--in", dest="input", required=needs_in, help="input JSON file")
        p.add_argument("--out", help="output JSON file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1, help="worker processes (RELU2_THREADS overrides)")

    g = sub.add_parser("generate", help="build a hardness instance")
    common(g, needs_in=False)
    g.add_argument("--reduction", required=True, choices=KINDS)
    g.add_argument("--k", type=int)
    g.add_argument("--kappa", type=int)
    g.add_argument("--ell", type=int)
    g.add_argument("--points-per-set", type=int)
    g.add_argument("--simple-pair", action="store_true")
    g.add_argument("--method", choices=("rejection", "moment"), default="rejection")
    g.add_argument("--pad", action="store_true", help="pad a 3-uniform hypergraph to k+1-uniform first")
    g.add_argument("--allow-nonpositive-gap", action="store_true")
    g.set_defaults(func=cmd_generate)

    def training(p):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--bounded", action="store_true")
        p.add_argument("--fix-coeffs", help="comma-separated coefficients, e.g. 1,1")
        p.add_argument("--kkt-tol", type=float, default=1e-8)
        p.add_argument("--loss-tol", type=float, default=1e-6)
        p.add_argument("--rank-tol", type=float, default=1e-9)
        p.add_argument("--grid-step", type=float, default=0.25)
        p.add_argument("--box-radius", type=float, default=1.0)

    t = sub.add_parser("train", help="train on a dataset")
    common(t)
    training(t)
    t.add_argument("--mode", choices=("exact", "epsnet", "lp-realizable", "oracle"), default="exact")
    t.add_argument("--net-spacing", type=float, default=0.5)
    t.add_argument("--enum-cap", type=int, default=24)
    t.set_defaults(func=cmd_train)

    o = sub.add_parser("oracle", help="brute-force grid oracle")
    common(o)
    training(o)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="check a witness or a soundness gap")
    common(v)
    v.add_argument("--solution", help="JSON file holding the combinatorial solution")
    v.add_argument("--witness", action="store_true", help="check the witness (gadgets need no solution)")
    v.add_argument("--soundness", action="store_true", help="run the trainer against the certificate")
    v.add_argument("--roundtrip-setcover", action="store_true", help="--in is a set cover instance")
    v.add_argument("--fix-coeffs")
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("complexity", help="sample-complexity and generalization bounds")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--C", type=float, default=1.0)
    c.add_argument("--m", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_complexity)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
