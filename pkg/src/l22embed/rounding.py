"""Sweep-cut rounding of one-dimensional embeddings and the exhaustive oracle.

A one-dimensional embedding turns the relaxation's geometry into a line
metric; the optimum cut of a line metric is a threshold cut, so sweeping the
n-1 thresholds and keeping the sparsest inherits the line's cost/demand
ratio.  Combined with the demand-weighted spectral map this rounds the
relaxation with an r/delta guarantee whenever the generalized eigenvalue
certificate lambda_r >= phi_sdp / (1 - delta) holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .embeddings import DemandSpectral1DEmbedding
from .graphs import Cut, CutResult, WeightedGraph, cut_sparsity
from .pointset import pair_arrays
from .sdp import SdpInstance, SdpSolution
from .spectral import GeneralizedSpectrum, generalized_eigs

#: Exhaustive enumeration cap.
BRUTE_FORCE_MAX_N = 20


@dataclass(frozen=True)
class RoundingOutcome:
    """Result of rounding a one-dimensional embedding of an SDP solution."""

    best_cut: CutResult
    line_values: np.ndarray
    phi_sdp: float
    certified_ratio: float
    guarantee: Optional[float]  # r/delta when the eigenvalue certificate holds
    lambda_r: Optional[float]
    r: Optional[int]
    delta: Optional[float]


def _better(a: CutResult, b: CutResult) -> CutResult:
    """Min by (sparsity, |S|, lexicographic members); ``a`` wins ties."""
    ka = (a.sparsity, len(a.cut.members), a.cut.members)
    kb = (b.sparsity, len(b.cut.members), b.cut.members)
    return a if ka <= kb else b


def sweep_round(line_values, cost: WeightedGraph, demand: WeightedGraph) -> CutResult:
    """Best threshold cut of per-vertex line coordinates.

    Vertices are sorted by value (ties by index) and all n-1 prefix cuts are
    evaluated; cuts separating zero demand are skipped.  The minimum
    threshold sparsity never exceeds the line ratio
    (sum c_ij |y_i - y_j|) / (sum d_ij |y_i - y_j|).
    """
    y = np.asarray(line_values, dtype=float).ravel()
    n = y.size
    if n != cost.n or n != demand.n:
        raise ValueError(f"got {n} line values for graphs with n={cost.n}/{demand.n}")
    if np.ptp(y) == 0.0:
        raise ValueError("all line values are equal; no threshold cut is induced")
    order = np.lexsort((np.arange(n), y))
    best: Optional[CutResult] = None
    for k in range(1, n):
        result = cut_sparsity(Cut(n, tuple(order[:k])), cost, demand)
        if not result.feasible:
            continue
        best = result if best is None else _better(best, result)
    if best is None:
        raise ValueError("no threshold cut separates positive demand")
    return best


def line_ratio(line_values, cost: WeightedGraph, demand: WeightedGraph) -> float:
    """(sum c_ij |y_i - y_j|) / (sum d_ij |y_i - y_j|) over all pairs."""
    y = np.asarray(line_values, dtype=float).ravel()
    rows, cols = pair_arrays(y.size)
    gaps = np.abs(y[rows] - y[cols])
    denom = float(np.sum(demand.pair_weights * gaps))
    if denom <= 0:
        raise ValueError("line separates zero demand")
    return float(np.sum(cost.pair_weights * gaps)) / denom


def brute_force_sparsest_cut(cost: WeightedGraph, demand: WeightedGraph) -> CutResult:
    """Exhaustive sparsest cut over all 2^(n-1) - 1 cuts (vertex 0 fixed aside).

    Cuts are reported as the side not containing vertex 0; zero-demand cuts
    are skipped; ties break by smallest sparsity, then |S|, then
    lexicographic members.  Rejects n > 20.
    """
    n = cost.n
    if demand.n != n:
        raise ValueError(f"cost graph has n={n}, demand graph has n={demand.n}")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"n={n} exceeds brute-force cap {BRUTE_FORCE_MAX_N}")
    rows, cols = pair_arrays(n)
    wc, wd = cost.pair_weights, demand.pair_weights
    best: Optional[CutResult] = None
    chunk = 1 << 14
    masks_all = np.arange(1, 1 << (n - 1), dtype=np.uint64)
    for start in range(0, masks_all.size, chunk):
        masks = masks_all[start : start + chunk]
        # vertex v in S iff bit v-1 of mask (vertex 0 never in S)
        bits = (masks[:, None] >> np.arange(n - 1, dtype=np.uint64)[None, :]) & 1
        ind = np.concatenate([np.zeros((masks.size, 1), dtype=np.uint64), bits], axis=1)
        sep = ind[:, rows] != ind[:, cols]
        costs = sep @ wc
        demands = sep @ wd
        feasible = demands > 0
        if not np.any(feasible):
            continue
        ratios = np.full(masks.size, np.inf)
        ratios[feasible] = costs[feasible] / demands[feasible]
        for idx in np.flatnonzero(ratios <= ratios.min()):
            members = tuple(int(v) for v in np.flatnonzero(ind[idx]))
            cand = CutResult(Cut(n, members), float(costs[idx]), float(demands[idx]), float(ratios[idx]))
            best = cand if best is None else _better(best, cand)
    if best is None:
        raise ValueError("no cut separates positive demand")
    return best


def round_sparsest_cut(
    inst: SdpInstance,
    sol: SdpSolution,
    delta: float = 0.5,
    r: Optional[int] = None,
    spectrum: Optional[GeneralizedSpectrum] = None,
) -> RoundingOutcome:
    """Round a solved relaxation via the demand-weighted spectral line map.

    Sweeps the one-dimensional embedding of the extracted points and
    attaches the r/delta guarantee iff the generalized eigenvalue
    certificate lambda_r >= phi_sdp / (1 - delta) holds (with ``r`` chosen
    as the smallest certified rank when not given).  The cut and its
    sparsity are always reported, certificate or not.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not sol.converged:
        raise ValueError("refusing to round a non-converged solution")
    if not sol.points.validated_l22:
        raise ValueError("extracted points failed validation; cannot round")
    emb = DemandSpectral1DEmbedding(validate_l22=False)
    emb.fit(sol.points, demand=inst.demand)
    y = emb.line_values(sol.points)
    if np.ptp(y) == 0.0:
        raise ValueError(
            "degenerate embedding: all line values equal "
            f"(sigma1={emb.embedding_.meta.get('sigma1')!r})"
        )
    best = sweep_round(y, inst.cost, inst.demand)
    if spectrum is None:
        spectrum = generalized_eigs(inst.cost, inst.demand)
    if r is None:
        r = spectrum.r_certificate(sol.phi_sdp, delta)
    guarantee = lam = None
    if r is not None and 1 <= r <= spectrum.lambdas.size:
        lam = spectrum.lambda_r(r)
        if lam >= sol.phi_sdp / (1.0 - delta):
            guarantee = r / delta
    ratio = best.sparsity / sol.phi_sdp if sol.phi_sdp > 0 else np.inf
    return RoundingOutcome(
        best_cut=best,
        line_values=y,
        phi_sdp=sol.phi_sdp,
        certified_ratio=ratio,
        guarantee=guarantee,
        lambda_r=lam,
        r=r,
        delta=delta,
    )
