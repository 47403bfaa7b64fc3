"""JSON interchange for point sets, graphs, spectra, embeddings, and reports.

All floats serialize via Python's repr, which round-trips float64 exactly.
Artifacts written by the CLI embed a provenance block {tool_version,
parameters, input_hashes} plus a timestamp that deterministic runs omit.
"""

from __future__ import annotations

import hashlib
import json
from typing import Optional

import numpy as np

from . import __version__
from .embeddings import DistortionReport, LinearEmbedding
from .graphs import WeightedGraph
from .mvee import EllipsoidResult
from .pointset import PointSet
from .rounding import RoundingOutcome
from .spectral import DifferenceSpectrum


def dumps(obj: dict) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def provenance(parameters: dict, input_hashes: Optional[dict] = None, timestamp=None) -> dict:
    meta = {
        "tool_version": __version__,
        "parameters": parameters,
        "input_hashes": input_hashes or {},
    }
    if timestamp is not None:
        meta["timestamp"] = timestamp
    return meta


def pointset_to_dict(ps: PointSet) -> dict:
    return {"n": ps.n, "d": ps.d, "points": ps.points.tolist()}


def pointset_from_dict(payload: dict) -> PointSet:
    for key in ("n", "d", "points"):
        if key not in payload:
            raise ValueError(f"point-set JSON missing field {key!r}")
    pts = np.asarray(payload["points"], dtype=float)
    if pts.shape != (int(payload["n"]), int(payload["d"])):
        raise ValueError(
            f"points shape {pts.shape} disagrees with n={payload['n']}, d={payload['d']}"
        )
    return PointSet(pts)


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "n": g.n,
        "edges": [{"i": i, "j": j, "w": w} for i, j, w in g.edges()],
    }


def graph_from_dict(payload: dict) -> WeightedGraph:
    for key in ("n", "edges"):
        if key not in payload:
            raise ValueError(f"graph JSON missing field {key!r}")
    edges = []
    for e in payload["edges"]:
        i, j, w = int(e["i"]), int(e["j"]), float(e["w"])
        if not i < j:
            raise ValueError(f"edge ({i}, {j}) must have i < j")
        edges.append((i, j, w))
    return WeightedGraph.from_edges(int(payload["n"]), edges)


def spectrum_to_dict(spec: DifferenceSpectrum) -> dict:
    return {
        "sigma": spec.sigma.tolist(),
        "stable_rank": spec.stable_rank,
        "u_top": spec.u_top.tolist(),
        "v_top": spec.v_top.tolist(),
    }


def embedding_to_dict(emb) -> dict:
    if not isinstance(emb, LinearEmbedding):
        emb = emb.embedding_
    payload = {
        "method": emb.method,
        "A": emb.matrix.tolist(),
        "p": emb.pair_weights.tolist() if emb.pair_weights is not None else None,
    }
    if emb.meta:
        payload["meta"] = {k: _plain(v) for k, v in emb.meta.items()}
    return payload


def embedding_from_dict(payload: dict) -> LinearEmbedding:
    for key in ("method", "A"):
        if key not in payload:
            raise ValueError(f"embedding JSON missing field {key!r}")
    p = payload.get("p")
    return LinearEmbedding(
        matrix=np.asarray(payload["A"], dtype=float),
        method=str(payload["method"]),
        pair_weights=None if p is None else np.asarray(p, dtype=float),
        meta=dict(payload.get("meta", {})),
    )


def distortion_to_dict(rep: DistortionReport) -> dict:
    return {
        "contraction_ok": rep.contraction_ok,
        "worst_expansion": rep.worst_expansion,
        "worst_case_distortion": _plain(rep.worst_case_distortion),
        "average_distortion": _plain(rep.average_distortion),
        "worst_expansion_pair": list(rep.worst_expansion_pair),
        "worst_distortion_pair": list(rep.worst_distortion_pair),
    }


def ellipsoid_to_dict(ell: EllipsoidResult) -> dict:
    return {
        "Q": ell.Q.tolist(),
        "alpha": ell.alpha.tolist(),
        "eps": ell.eps,
        "converged": ell.converged,
    }


def outcome_to_dict(out: RoundingOutcome) -> dict:
    return {
        "cut": list(out.best_cut.cut.members),
        "phi": _plain(out.best_cut.sparsity),
        "phi_sdp": out.phi_sdp,
        "ratio": _plain(out.certified_ratio),
        "guarantee": out.guarantee,
        "lambda_r": out.lambda_r,
        "r": out.r,
        "delta": out.delta,
        "line_values": out.line_values.tolist(),
    }


def _plain(v):
    """JSON-safe scalar: infinities become strings, numpy scalars become Python."""
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v
