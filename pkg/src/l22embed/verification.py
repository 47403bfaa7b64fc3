"""Machine-checkable verification of the embedding guarantees.

Binds each guarantee to a measured quantity and a bound on a concrete point
configuration, so a run produces an itemized pass/fail report instead of a
proof.  The checks are deterministic and idempotent: verdicts depend only on
the input bits and the tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ._validation import as_points
from .embeddings import (
    DemandSpectral1DEmbedding,
    DemandSquaredLengthEmbedding,
    GoemansEmbedding,
    Spectral1DEmbedding,
    SquaredLengthEmbedding,
    StableRankEmbedding,
    distortion_report,
    embedded_pair_norms,
)
from .graphs import WeightedGraph
from .pointset import difference_matrix, pair_arrays, weighted_difference_matrix
from .spectral import svd_spectrum

#: Exact pair-pair checks are O(n^4); sample beyond this size.
KEY_LEMMA_EXACT_MAX_N = 25
KEY_LEMMA_SAMPLES = 100_000


@dataclass(frozen=True)
class KeyLemmaReport:
    """Worst slack of the inner-product inequalities over pairs of pairs.

    For a valid configuration every two pairs (i,j), (k,l) satisfy

        <x_i-x_j, (x_k-x_l)/||x_k-x_l||>^2 <= |<x_i-x_j, x_k-x_l>|
                                           <= ||x_i-x_j||^2.

    ``worst_violation`` is the largest excess over either bound (negative
    when both hold strictly); ``worst_pairs`` names the witnessing
    ((i,j),(k,l)).
    """

    ok: bool
    worst_violation: float
    worst_pairs: tuple
    exhaustive: bool


def verify_key_lemma(
    ps, tol: float = 1e-9, seed: int = 0, noise_floor: float = 0.0
) -> KeyLemmaReport:
    """Check the inner-product bounds over all (or sampled) pairs of pairs.

    For solver-derived configurations pass a nonzero ``noise_floor``: the
    projection inequality divides by the squared length of the (k, l) pair,
    which amplifies the validity residual without bound when that pair is a
    near-duplicate, so divisor pairs at or below noise_floor times the
    largest squared distance are skipped there.
    """
    pts = as_points(ps)
    n = pts.shape[0]
    rows, cols = pair_arrays(n)
    diffs = pts[rows] - pts[cols]
    m = diffs.shape[0]
    sq = np.sum(diffs**2, axis=1)
    scale = max(float(sq.max()), 1e-300)

    exhaustive = n <= KEY_LEMMA_EXACT_MAX_N
    if exhaustive:
        s_idx = np.repeat(np.arange(m), m)
        t_idx = np.tile(np.arange(m), m)
    else:
        rng = np.random.default_rng(seed)
        s_idx = rng.integers(0, m, size=KEY_LEMMA_SAMPLES)
        t_idx = rng.integers(0, m, size=KEY_LEMMA_SAMPLES)

    inner = np.abs(np.sum(diffs[s_idx] * diffs[t_idx], axis=1))
    # second inequality: |<d_s, d_t>| <= ||d_s||^2
    viol2 = inner - sq[s_idx]
    # first inequality: <d_s, d_t>^2 / ||d_t||^2 <= |<d_s, d_t>|
    norm_t = sq[t_idx]
    usable_t = norm_t > noise_floor * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        proj_sq = np.where(usable_t, inner**2 / np.where(usable_t, norm_t, 1.0), 0.0)
    viol1 = np.where(usable_t, proj_sq - inner, -np.inf)

    viol = np.maximum(viol1, viol2)
    k = int(np.argmax(viol))
    worst = float(viol[k])
    pair_s = (int(rows[s_idx[k]]), int(cols[s_idx[k]]))
    pair_t = (int(rows[t_idx[k]]), int(cols[t_idx[k]]))
    return KeyLemmaReport(
        ok=bool(worst <= tol * scale),
        worst_violation=worst,
        worst_pairs=(pair_s, pair_t),
        exhaustive=exhaustive,
    )


@dataclass(frozen=True)
class ClaimVerdict:
    """One verified claim: measured value against its bound."""

    claim: str
    measured: float
    bound: float
    ok: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class TheoremSuiteReport:
    items: List[ClaimVerdict]

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)


def verify_theorem_suite(
    ps,
    demand: Optional[WeightedGraph] = None,
    contraction_tol: float = 1e-9,
    beta_rtol: float = 1e-6,
    identity_rtol: float = 1e-8,
    mvee_eps: float = 1e-6,
    noise_floor: float = 0.0,
) -> TheoremSuiteReport:
    """Run every embedding on a configuration and verify its guarantee.

    Items cover: contraction for each method, the stable-rank average
    distortion bound, the exact line-sum identity of the spectral map, the
    sqrt-rank average distortion of the squared-length maps, and the
    worst-case bound of the ellipsoid map.  Per-item failures (e.g. a
    degenerate input for one construction) are reported as failed items
    without aborting the rest.

    Pass a nonzero ``noise_floor`` for solver-derived configurations so
    pairs below the noise resolution stay out of the ratio statistics.
    """
    pts = as_points(ps)
    items: List[ClaimVerdict] = []

    lemma = verify_key_lemma(pts, tol=contraction_tol, noise_floor=noise_floor)
    items.append(
        ClaimVerdict(
            claim="key_lemma_inner_products",
            measured=lemma.worst_violation,
            bound=0.0,
            ok=lemma.ok,
            witness=f"pairs {lemma.worst_pairs}",
        )
    )

    spec = None
    try:
        spec = svd_spectrum(difference_matrix(pts))
    except ValueError as exc:
        items.append(ClaimVerdict("difference_spectrum", np.nan, np.nan, False, str(exc)))

    estimators = {
        "squared_length": SquaredLengthEmbedding(validate_l22=False),
        "stable_rank_psd": StableRankEmbedding(validate_l22=False),
        "spectral_1d": Spectral1DEmbedding(validate_l22=False),
        "goemans_mvee": GoemansEmbedding(eps=mvee_eps, validate_l22=False),
    }
    if demand is not None:
        estimators["demand_spectral_1d"] = DemandSpectral1DEmbedding(validate_l22=False)
        estimators["demand_squared_length"] = DemandSquaredLengthEmbedding(validate_l22=False)

    fitted = {}
    for name, est in estimators.items():
        try:
            if name.startswith("demand_"):
                est.fit(pts, demand=demand)
            else:
                est.fit(pts)
            fitted[name] = est
        except ValueError as exc:
            items.append(ClaimVerdict(f"fit_{name}", np.nan, np.nan, False, str(exc)))

    for name, est in fitted.items():
        rep = distortion_report(pts, est, contraction_tol=contraction_tol, noise_floor=noise_floor)
        items.append(
            ClaimVerdict(
                claim=f"contraction_{name}",
                measured=rep.worst_expansion,
                bound=1.0 + contraction_tol,
                ok=rep.contraction_ok,
                witness=f"pair {rep.worst_expansion_pair}",
            )
        )

    if spec is not None and "stable_rank_psd" in fitted:
        rep = distortion_report(pts, fitted["stable_rank_psd"], noise_floor=noise_floor)
        items.append(
            ClaimVerdict(
                claim="average_distortion_le_stable_rank",
                measured=rep.average_distortion,
                bound=spec.stable_rank * (1.0 + beta_rtol),
                ok=bool(rep.average_distortion <= spec.stable_rank * (1.0 + beta_rtol)),
            )
        )

    if spec is not None and "spectral_1d" in fitted:
        est = fitted["spectral_1d"]
        sums = float(np.sum(embedded_pair_norms(est.matrix_, pts)))
        sigma1_sq = float(spec.sigma[0] ** 2)
        err = abs(sums - sigma1_sq) / sigma1_sq
        items.append(
            ClaimVerdict(
                claim="spectral_line_sum_equals_sigma1_sq",
                measured=sums,
                bound=sigma1_sq,
                ok=bool(err <= identity_rtol),
                witness=f"relative error {err:.2e}",
            )
        )
        rep = distortion_report(pts, est, noise_floor=noise_floor)
        items.append(
            ClaimVerdict(
                claim="spectral_1d_average_distortion_le_stable_rank",
                measured=rep.average_distortion,
                bound=spec.stable_rank * (1.0 + beta_rtol),
                ok=bool(rep.average_distortion <= spec.stable_rank * (1.0 + beta_rtol)),
            )
        )

    if spec is not None and "squared_length" in fitted:
        rep = distortion_report(pts, fitted["squared_length"], noise_floor=noise_floor)
        bound = np.sqrt(spec.rank) * (1.0 + beta_rtol)
        items.append(
            ClaimVerdict(
                claim="squared_length_average_distortion_le_sqrt_rank",
                measured=rep.average_distortion,
                bound=float(bound),
                ok=bool(rep.average_distortion <= bound),
            )
        )

    if "goemans_mvee" in fitted:
        est = fitted["goemans_mvee"]
        rep = distortion_report(pts, est, noise_floor=noise_floor)
        bound = est.distortion_bound_()
        items.append(
            ClaimVerdict(
                claim="mvee_worst_case_distortion",
                measured=rep.worst_case_distortion,
                bound=bound,
                ok=bool(rep.worst_case_distortion <= bound * (1.0 + 1e-9)),
                witness=f"pair {rep.worst_distortion_pair}, converged={est.converged_}",
            )
        )

    if demand is not None and "demand_spectral_1d" in fitted:
        est = fitted["demand_spectral_1d"]
        wspec = svd_spectrum(weighted_difference_matrix(pts, demand))
        rep = distortion_report(pts, est, demand=demand, noise_floor=noise_floor)
        items.append(
            ClaimVerdict(
                claim="demand_spectral_1d_average_distortion_le_stable_rank",
                measured=rep.average_distortion,
                bound=wspec.stable_rank * (1.0 + beta_rtol),
                ok=bool(rep.average_distortion <= wspec.stable_rank * (1.0 + beta_rtol)),
            )
        )

    if demand is not None and "demand_squared_length" in fitted:
        wspec = svd_spectrum(weighted_difference_matrix(pts, demand))
        rep = distortion_report(pts, fitted["demand_squared_length"], demand=demand, noise_floor=noise_floor)
        bound = np.sqrt(wspec.rank) * (1.0 + beta_rtol)
        items.append(
            ClaimVerdict(
                claim="demand_squared_length_average_distortion_le_sqrt_rank",
                measured=rep.average_distortion,
                bound=float(bound),
                ok=bool(rep.average_distortion <= bound),
            )
        )

    return TheoremSuiteReport(items=items)
