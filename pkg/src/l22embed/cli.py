"""Command-line front-end wiring generators, solver, embeddings, and rounding.

Every artifact is JSON with an embedded provenance block {tool_version,
parameters, input_hashes} plus a timestamp; ``--deterministic`` omits the
timestamp so repeated runs with the same inputs and seed are byte-identical.

Exit codes: 0 success, 1 verification failure, 2 usage or input-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import numpy as np

from . import __version__
from ._validation import NotL22Error
from .embeddings import (
    DemandSpectral1DEmbedding,
    DemandSquaredLengthEmbedding,
    GoemansEmbedding,
    Spectral1DEmbedding,
    SquaredLengthEmbedding,
    StableRankEmbedding,
    distortion_report,
)
from .generators import (
    GeneratorSpec,
    INSTANCE_KINDS,
    POINTSET_KINDS,
    gen_instance,
    gen_pointset,
)
from .pointset import check_l22, difference_matrix, weighted_difference_matrix
from .rounding import brute_force_sparsest_cut, round_sparsest_cut
from .sdp import SdpInstance, load_solution, save_solution, solve_sdp
from .serialize import (
    distortion_to_dict,
    dumps,
    ellipsoid_to_dict,
    embedding_to_dict,
    file_sha256,
    graph_from_dict,
    graph_to_dict,
    outcome_to_dict,
    pointset_from_dict,
    pointset_to_dict,
    provenance,
    spectrum_to_dict,
)
from .spectral import svd_spectrum
from .verification import verify_theorem_suite

EMBED_METHODS = {
    "goemans": GoemansEmbedding,
    "sqlen": SquaredLengthEmbedding,
    "stable-rank": StableRankEmbedding,
    "spectral-1d": Spectral1DEmbedding,
    "demand-spectral-1d": DemandSpectral1DEmbedding,
    "demand-sqlen": DemandSquaredLengthEmbedding,
}


class UsageError(Exception):
    """Bad flags or malformed input files; maps to exit code 2."""


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}")


def _load_points(path: str):
    try:
        return pointset_from_dict(_read_json(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}")


def _load_graph(path: str):
    try:
        return graph_from_dict(_read_json(path))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}")


class Writer:
    """Writes provenance-stamped artifacts into the output directory."""

    def __init__(self, out_dir: str, parameters: dict, inputs: dict, deterministic: bool):
        self.out_dir = out_dir
        self.parameters = parameters
        self.hashes = {name: file_sha256(path) for name, path in inputs.items()}
        self.deterministic = deterministic
        os.makedirs(out_dir, exist_ok=True)

    def write(self, name: str, payload: dict) -> str:
        meta = provenance(
            self.parameters,
            self.hashes,
            timestamp=None if self.deterministic else time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        )
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps({"meta": meta, **payload}))
        return path


SCHEMA_HELP = """\
artifact schemas (all floats round-trip exactly; every artifact carries a
"meta" block {tool_version, parameters, input_hashes[, timestamp]}):

  points.json     {"n": int, "d": int, "points": [[float, ...], ...]}
  cost.json /     {"n": int, "edges": [{"i": int, "j": int, "w": float}, ...]}
  demand.json       with i < j and no duplicate pairs
  gram.json       {"n": int, "X": [[float, ...], ...], "phi_sdp": float}
  spectrum.json   {"sigma": [...], "stable_rank": float, "u_top": [...], "v_top": [...]}
  embedding.json  {"method": str, "A": [[float, ...], ...], "p": [...] | null}
  ellipsoid.json  {"Q": [[...]], "alpha": [...], "eps": float, "converged": bool}
  distortion.json {"contraction_ok": bool, "worst_expansion": float,
                   "worst_case_distortion": float, "average_distortion": float,
                   "worst_expansion_pair": [i, j], "worst_distortion_pair": [i, j]}
  outcome.json    {"cut": [int, ...], "phi": float, "phi_sdp": float, "ratio": float,
                   "guarantee": float | null, "lambda_r": float | null, ...}
  oracle.json     {"cut": [...], "cut_cost": float, "cut_demand": float, "phi_star": float}
  solver_log.jsonl  one {"iter": int, "objective": float, "max_residual": float} per solve
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l22embed",
        description="Embeddings of l2-squared metrics and sparsest-cut SDP rounding.",
        epilog=SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-6, help="numeric tolerance")
        p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
        p.add_argument("--max-iter", type=int, default=100_000, help="iteration cap")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=["json"], default="json")
        p.add_argument(
            "--deterministic",
            action="store_true",
            help="omit the timestamp so artifacts are byte-identical across runs",
        )
        p.add_argument("--threads", type=int, default=None, help="cap for BLAS thread pools")

    p = sub.add_parser("gen", help="generate a point set or instance")
    p.add_argument("--kind", required=True, choices=POINTSET_KINDS + INSTANCE_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--side", type=float)
    p.add_argument("--cuts", type=int)
    p.add_argument("--s", type=float, nargs="+", help="line positions for line_sqrt")
    p.add_argument("--blocks", type=int)
    p.add_argument("--bridge-weight", type=float)
    p.add_argument("--intra-weight", type=float)
    p.add_argument("--inter-weight", type=float)
    p.add_argument("--demand-kind", choices=["uniform", "random"], default="uniform")
    p.add_argument("--instance-kind", choices=INSTANCE_KINDS, help="for sdp_derived")
    common(p)

    p = sub.add_parser("check", help="validate the squared-distance triangle inequality")
    p.add_argument("--points", required=True)
    common(p)

    p = sub.add_parser("spectrum", help="SVD / stable-rank report of the difference matrix")
    p.add_argument("--points", required=True)
    p.add_argument("--demand", help="demand graph for the weighted variant")
    common(p)

    p = sub.add_parser("embed", help="fit an embedding and report its distortion")
    p.add_argument("--method", required=True, choices=sorted(EMBED_METHODS))
    p.add_argument("--points", required=True)
    p.add_argument("--demand", help="demand graph (required for demand-* methods)")
    p.add_argument("--eps", type=float, default=1e-6, help="ellipsoid tolerance (goemans)")
    common(p)

    p = sub.add_parser("sdp", help="solve the sparsest-cut relaxation")
    p.add_argument("--cost", required=True)
    p.add_argument("--demand", required=True)
    common(p)

    p = sub.add_parser("round", help="full rounding pipeline (solve + sweep + certificate)")
    p.add_argument("--cost", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--gram", help="reuse a solved Gram JSON instead of solving")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--r", type=int, default=None)
    common(p)

    p = sub.add_parser("verify", help="run the guarantee suite on a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--demand")
    common(p)

    p = sub.add_parser("oracle", help="brute-force optimal sparsest cut")
    p.add_argument("--cost", required=True)
    p.add_argument("--demand", required=True)
    common(p)

    return parser


def _cmd_gen(args) -> int:
    params = {}
    for key in ("n", "d", "side", "cuts", "blocks"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.s is not None:
        params["s"] = list(args.s)
    for key, dest in (
        ("bridge_weight", "bridge_weight"),
        ("intra_weight", "intra_weight"),
        ("inter_weight", "inter_weight"),
    ):
        val = getattr(args, key, None)
        if val is not None:
            params[dest] = val
    spec = GeneratorSpec(args.kind, params, seed=args.seed)
    writer = Writer(args.out, _params_dict(args), {}, args.deterministic)
    try:
        if args.kind in POINTSET_KINDS:
            if args.kind == "sdp_derived":
                if args.instance_kind is None:
                    raise UsageError("--instance-kind is required for sdp_derived")
                spec = GeneratorSpec(
                    args.kind, {**params, "instance_kind": args.instance_kind}, seed=args.seed
                )
            ps = gen_pointset(spec)
            path = writer.write("points.json", pointset_to_dict(ps))
            print(f"wrote {path} (n={ps.n}, d={ps.d})")
        else:
            params["demand"] = args.demand_kind
            inst = gen_instance(GeneratorSpec(args.kind, params, seed=args.seed))
            cpath = writer.write("cost.json", graph_to_dict(inst.cost))
            dpath = writer.write("demand.json", graph_to_dict(inst.demand))
            print(f"wrote {cpath} and {dpath} (n={inst.n})")
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"generator rejected parameters: {exc}")
    return 0


def _cmd_check(args) -> int:
    ps = _load_points(args.points)
    report = check_l22(ps, tol=args.tol)
    writer = Writer(args.out, _params_dict(args), {"points": args.points}, args.deterministic)
    path = writer.write(
        "check.json",
        {
            "ok": report.ok,
            "worst_triple": list(report.worst_triple) if report.worst_triple else None,
            "worst_violation": report.worst_violation,
            "scale": report.scale,
            "tol": report.tol,
        },
    )
    print(f"l22 check: {'ok' if report.ok else 'VIOLATED'} (report {path})")
    return 0 if report.ok else 1


def _cmd_spectrum(args) -> int:
    ps = _load_points(args.points)
    inputs = {"points": args.points}
    if args.demand:
        demand = _load_graph(args.demand)
        M = weighted_difference_matrix(ps, demand)
        inputs["demand"] = args.demand
    else:
        M = difference_matrix(ps)
    spec = svd_spectrum(M)
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    path = writer.write("spectrum.json", spectrum_to_dict(spec))
    print(f"stable rank {spec.stable_rank:.6f}, sigma1 {spec.sigma[0]:.6f} (report {path})")
    return 0


def _cmd_embed(args) -> int:
    ps = _load_points(args.points)
    cls = EMBED_METHODS[args.method]
    inputs = {"points": args.points}
    demand = None
    if args.method.startswith("demand-"):
        if not args.demand:
            raise UsageError(f"--demand is required for method {args.method}")
        demand = _load_graph(args.demand)
        inputs["demand"] = args.demand
    kwargs = {}
    if args.method == "goemans":
        kwargs = {"eps": args.eps, "max_iter": args.max_iter}
    est = cls(**kwargs)
    try:
        if demand is not None:
            est.fit(ps, demand=demand)
        else:
            est.fit(ps)
    except NotL22Error as exc:
        print(f"embedding refused: {exc}", file=sys.stderr)
        return 1
    report = distortion_report(
        ps, est, demand=demand, contraction_tol=args.tol, noise_floor=args.tol
    )
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    epath = writer.write("embedding.json", embedding_to_dict(est))
    rpath = writer.write("distortion.json", distortion_to_dict(report))
    if args.method == "goemans":
        writer.write("ellipsoid.json", ellipsoid_to_dict(est.ellipsoid_))
    print(
        f"{args.method}: contraction_ok={report.contraction_ok} "
        f"beta={report.average_distortion:.6f} Delta={report.worst_case_distortion:.6f} "
        f"({epath}, {rpath})"
    )
    return 0 if report.contraction_ok else 1


def _make_instance(args) -> tuple:
    cost = _load_graph(args.cost)
    demand = _load_graph(args.demand)
    try:
        inst = SdpInstance(cost, demand)
    except ValueError as exc:
        raise UsageError(str(exc))
    return inst, {"cost": args.cost, "demand": args.demand}


def _cmd_sdp(args) -> int:
    inst, inputs = _make_instance(args)
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    log_path = os.path.join(args.out, "solver_log.jsonl")
    sol = solve_sdp(inst, tol=args.tol, max_iter=args.max_iter, log_path=log_path)
    save_solution(os.path.join(args.out, "gram.json"), sol)
    ppath = writer.write("points.json", pointset_to_dict(sol.points))
    print(
        f"phi_sdp={sol.phi_sdp:.8f} converged={sol.converged} "
        f"residuals=(tri {sol.residuals.triangle:.2e}, norm {sol.residuals.normalization:.2e}) "
        f"points {ppath}"
    )
    return 0 if sol.converged else 1


def _cmd_round(args) -> int:
    inst, inputs = _make_instance(args)
    if args.gram:
        try:
            sol = load_solution(args.gram, inst)
        except ValueError as exc:
            raise UsageError(f"{args.gram}: {exc}")
        inputs["gram"] = args.gram
    else:
        sol = solve_sdp(inst, tol=args.tol, max_iter=args.max_iter)
    outcome = round_sparsest_cut(inst, sol, delta=args.delta, r=args.r)
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    path = writer.write("outcome.json", outcome_to_dict(outcome))
    print(
        f"cut {outcome.best_cut.cut.members} phi={outcome.best_cut.sparsity:.8f} "
        f"phi_sdp={outcome.phi_sdp:.8f} ratio={outcome.certified_ratio:.4f} "
        f"guarantee={outcome.guarantee} ({path})"
    )
    return 0


def _cmd_verify(args) -> int:
    ps = _load_points(args.points)
    inputs = {"points": args.points}
    demand = None
    if args.demand:
        demand = _load_graph(args.demand)
        inputs["demand"] = args.demand
    report = verify_theorem_suite(
        ps, demand=demand, contraction_tol=args.tol, noise_floor=args.tol
    )
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    items = [
        {
            "claim": it.claim,
            "measured": _json_float(it.measured),
            "bound": _json_float(it.bound),
            "ok": it.ok,
            "witness": it.witness,
        }
        for it in report.items
    ]
    path = writer.write("verify.json", {"ok": report.ok, "items": items})
    for it in report.items:
        print(f"{'PASS' if it.ok else 'FAIL'} {it.claim}: measured={it.measured:.6g} bound={it.bound:.6g}")
    print(f"report {path}")
    return 0 if report.ok else 1


def _cmd_oracle(args) -> int:
    inst, inputs = _make_instance(args)
    try:
        best = brute_force_sparsest_cut(inst.cost, inst.demand)
    except ValueError as exc:
        raise UsageError(str(exc))
    writer = Writer(args.out, _params_dict(args), inputs, args.deterministic)
    path = writer.write(
        "oracle.json",
        {
            "cut": list(best.cut.members),
            "cut_cost": best.cut_cost,
            "cut_demand": best.cut_demand,
            "phi_star": best.sparsity,
        },
    )
    print(f"phi* = {best.sparsity:.8f} via cut {best.cut.members} ({path})")
    return 0


def _params_dict(args) -> dict:
    # the output directory is not a semantic input, and absolute input paths
    # would break byte-identical reruns; content is pinned by input_hashes
    skip = {"command", "func", "threads", "out"}
    path_args = {"points", "cost", "demand", "gram"}
    params = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        params[k] = os.path.basename(str(v)) if k in path_args else v
    return params


def _json_float(v: float):
    return v if np.isfinite(v) else repr(float(v))


COMMANDS = {
    "gen": _cmd_gen,
    "check": _cmd_check,
    "spectrum": _cmd_spectrum,
    "embed": _cmd_embed,
    "sdp": _cmd_sdp,
    "round": _cmd_round,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if getattr(args, "threads", None):
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=args.threads):
                return COMMANDS[args.command](args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
