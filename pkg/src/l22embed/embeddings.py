"""Contractive embeddings of l2-squared configurations into l2.

Every construction here maps x to A x for a matrix A built so that

    ||A (x_i - x_j)|| <= ||x_i - x_j||^2    for all pairs (contraction),

which holds whenever A = P^{1/2} for P = sum_{k<l} p_kl (x_k - x_l)(x_k - x_l)^T
with {p_kl} a probability distribution over pairs: for points satisfying the
squared-distance triangle inequality, |<x_i - x_j, x_k - x_l>| never exceeds
||x_i - x_j||^2.  The constructions differ in the choice of p (or of a single
direction for the one-dimensional variants) and hence in the distortion they
certify:

- squared-length distribution: average distortion at most sqrt(rank),
- top-singular-vector weights: average distortion at most the stable rank,
- one-dimensional spectral maps: same stable-rank bound, embedding into a line,
- John weights of the minimum-volume enclosing ellipsoid: worst-case
  distortion at most sqrt((1 + eps) * rank).

Estimators follow the scikit-learn fit/transform protocol; demand-weighted
variants take the demand graph as a fit parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_pair_weights, as_points, check_distribution
from .graphs import WeightedGraph
from .mvee import mvee_centered
from .pointset import (
    DEFAULT_L22_TOL,
    difference_matrix,
    num_pairs,
    pair_arrays,
    validated,
    weighted_difference_matrix,
)
from .spectral import svd_spectrum


@dataclass(frozen=True)
class LinearEmbedding:
    """A fitted linear map f(x) = A x with provenance metadata.

    ``kind`` is "functional" for one-dimensional maps (A is 1 x d) and
    "matrix" otherwise.  ``pair_weights`` carries the pair distribution that
    generated A, when one was used.
    """

    matrix: np.ndarray
    method: str
    pair_weights: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "functional" if self.matrix.shape[0] == 1 else "matrix"

    def apply(self, X) -> np.ndarray:
        return as_points(X) @ self.matrix.T


def psd_sqrt(P: np.ndarray) -> np.ndarray:
    """Symmetric square root with negative eigenvalues clamped to zero."""
    vals, vecs = np.linalg.eigh((P + P.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _distribution_root(pts: np.ndarray, p: np.ndarray) -> np.ndarray:
    """P^{1/2} for P = sum_kl p_kl (x_k - x_l)(x_k - x_l)^T."""
    rows, cols = pair_arrays(pts.shape[0])
    diffs = pts[rows] - pts[cols]  # (m, d)
    P = (diffs * p[:, None]).T @ diffs
    return psd_sqrt(P)


def embedded_pair_norms(matrix: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """||A(x_i - x_j)|| over canonical pairs."""
    rows, cols = pair_arrays(pts.shape[0])
    img = pts @ matrix.T
    return np.linalg.norm(img[rows] - img[cols], axis=1)


class _BaseContractiveEmbedding(TransformerMixin, BaseEstimator):
    """Shared fit/transform plumbing for the embedding estimators."""

    method = ""

    def __init__(self, validate_l22=True, l22_tol=DEFAULT_L22_TOL):
        self.validate_l22 = validate_l22
        self.l22_tol = l22_tol

    def fit(self, X, y=None, **fit_params):
        pts = as_points(X)
        if self.validate_l22:
            validated(pts, self.l22_tol)
        matrix, pair_weights, meta = self._fit(pts, **fit_params)
        self.matrix_ = matrix
        self.pair_weights_ = pair_weights
        self.embedding_ = LinearEmbedding(matrix, self.method, pair_weights, meta)
        self.n_features_in_ = pts.shape[1]
        return self

    def _fit(self, pts, **fit_params):
        raise NotImplementedError

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        pts = as_points(X)
        if pts.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {pts.shape[1]} features, embedding was fitted on {self.n_features_in_}"
            )
        return pts @ self.matrix_.T

    @property
    def kind_(self) -> str:
        check_is_fitted(self, "matrix_")
        return self.embedding_.kind


class PairDistributionEmbedding(_BaseContractiveEmbedding):
    """Contraction from an explicit probability distribution over pairs.

    Parameters
    ----------
    pair_weights : array of length C(n, 2)
        Non-negative weights over the canonical pairs, summing to 1.
    """

    method = "pair_distribution"

    def __init__(self, pair_weights=None, validate_l22=True, l22_tol=DEFAULT_L22_TOL):
        super().__init__(validate_l22=validate_l22, l22_tol=l22_tol)
        self.pair_weights = pair_weights

    def _fit(self, pts, **fit_params):
        if self.pair_weights is None:
            raise ValueError("pair_weights must be provided")
        p = as_pair_weights(self.pair_weights, num_pairs(pts.shape[0]))
        check_distribution(p)
        return _distribution_root(pts, p), p, {}


class SquaredLengthEmbedding(_BaseContractiveEmbedding):
    """Pair weights proportional to squared lengths ||x_k - x_l||^2.

    Certifies average distortion at most sqrt(rank of the difference span)
    under uniform pair weighting.
    """

    method = "squared_length"

    def _fit(self, pts, **fit_params):
        rows, cols = pair_arrays(pts.shape[0])
        sq = np.sum((pts[rows] - pts[cols]) ** 2, axis=1)
        total = sq.sum()
        if total <= 0:
            raise ValueError("all points coincide; squared-length distribution undefined")
        p = sq / total
        return _distribution_root(pts, p), p, {}


class DemandSquaredLengthEmbedding(_BaseContractiveEmbedding):
    """Pair weights proportional to d_kl ||x_k - x_l||^2 for a demand graph.

    Certifies demand-weighted average distortion at most sqrt(rank of the
    demand-supported difference span).  Pass the demand graph to ``fit``.
    """

    method = "demand_squared_length"

    def _fit(self, pts, demand: WeightedGraph = None, **fit_params):
        if demand is None:
            raise ValueError("fit requires demand=<WeightedGraph>")
        if demand.n != pts.shape[0]:
            raise ValueError(f"demand graph has n={demand.n}, points have n={pts.shape[0]}")
        rows, cols = pair_arrays(pts.shape[0])
        sq = np.sum((pts[rows] - pts[cols]) ** 2, axis=1)
        mass = demand.pair_weights * sq
        total = mass.sum()
        if total <= 0:
            raise ValueError("demand-weighted squared lengths sum to zero")
        p = mass / total
        return _distribution_root(pts, p), p, {}


class StableRankEmbedding(_BaseContractiveEmbedding):
    """Pair weights |v_kl| / ||v||_1 from the top right singular vector of
    the difference matrix.

    Certifies average distortion at most the stable rank
    ||M||_F^2 / sigma_1(M)^2.  Exposes ``stable_rank_`` after fitting.
    """

    method = "stable_rank_psd"

    def _fit(self, pts, **fit_params):
        spec = svd_spectrum(difference_matrix(pts))
        p = np.abs(spec.v_top)
        p /= p.sum()
        self.stable_rank_ = spec.stable_rank
        self.spectrum_ = spec
        return _distribution_root(pts, p), p, {"stable_rank": spec.stable_rank}


class Spectral1DEmbedding(_BaseContractiveEmbedding):
    """One-dimensional map x -> (sigma_1 / ||v||_1) <x, u> along the top
    left singular vector of the difference matrix.

    Same stable-rank average-distortion certificate as
    :class:`StableRankEmbedding`, with the exact identity

        sum_{i<j} |f(x_i) - f(x_j)| = sigma_1^2.
    """

    method = "spectral_1d"

    def _fit(self, pts, **fit_params):
        spec = svd_spectrum(difference_matrix(pts))
        scale = spec.sigma[0] / np.abs(spec.v_top).sum()
        self.stable_rank_ = spec.stable_rank
        self.spectrum_ = spec
        return (
            scale * spec.u_top[None, :],
            None,
            {"sigma1": float(spec.sigma[0]), "stable_rank": spec.stable_rank},
        )

    def line_values(self, X) -> np.ndarray:
        """Per-vertex coordinates on the embedded line."""
        return self.transform(X).ravel()


class DemandSpectral1DEmbedding(_BaseContractiveEmbedding):
    """One-dimensional map from the top singular pair of the demand-weighted
    difference matrix (columns sqrt(d_kl) (x_k - x_l)).

    The map is x -> (sigma_1 / Z) <x, u> with Z = sum sqrt(d_kl) |v_kl|,
    mirroring the unweighted spectral map; it is a contraction, and the
    demand-weighted sum satisfies sum d_ij |f(x_i) - f(x_j)| = sigma_1^2,
    so the demand-weighted average distortion is at most the stable rank of
    the weighted matrix.  Pass the demand graph to ``fit``.
    """

    method = "demand_spectral_1d"

    def _fit(self, pts, demand: WeightedGraph = None, **fit_params):
        if demand is None:
            raise ValueError("fit requires demand=<WeightedGraph>")
        M = weighted_difference_matrix(pts, demand)
        spec = svd_spectrum(M)
        normalizer = float(np.sum(M.pair_scales * np.abs(spec.v_top)))
        if normalizer <= 0:
            raise ValueError("demand-weighted difference matrix is zero")
        scale = spec.sigma[0] / normalizer
        self.stable_rank_ = spec.stable_rank
        self.spectrum_ = spec
        return (
            scale * spec.u_top[None, :],
            None,
            {
                "sigma1": float(spec.sigma[0]),
                "normalizer": normalizer,
                "stable_rank": spec.stable_rank,
            },
        )

    def line_values(self, X) -> np.ndarray:
        return self.transform(X).ravel()


class GoemansEmbedding(_BaseContractiveEmbedding):
    """Worst-case sqrt((1 + eps) * rank) embedding via the enclosing ellipsoid.

    Uses the John decomposition Q^{-1} = sum alpha_kl (x_k - x_l)(x_k - x_l)^T
    of the minimum-volume origin-centered ellipsoid of the differences:
    with p = alpha / d_eff the map P^{1/2} x equals d_eff^{-1/2} Q^{-1/2} x
    within the difference span, so every pair satisfies

        ||x_i - x_j||^2 / sqrt((1 + eps) d_eff) <= ||f(x_i) - f(x_j)||
                                                <= ||x_i - x_j||^2.

    Parameters
    ----------
    eps : float
        Ellipsoid convergence parameter; the certified distortion degrades
        gracefully to sqrt((1 + eps_achieved) * d_eff).
    max_iter : int
        Iteration cap; hitting it leaves ``converged_`` False.
    """

    method = "goemans_mvee"

    def __init__(self, eps=1e-6, max_iter=100_000, validate_l22=True, l22_tol=DEFAULT_L22_TOL):
        super().__init__(validate_l22=validate_l22, l22_tol=l22_tol)
        self.eps = eps
        self.max_iter = max_iter

    def _fit(self, pts, **fit_params):
        ell = mvee_centered(difference_matrix(pts), eps=self.eps, max_iter=self.max_iter)
        p = ell.alpha / ell.alpha.sum()
        self.ellipsoid_ = ell
        self.converged_ = ell.converged
        self.d_eff_ = ell.d_eff
        meta = {
            "eps": ell.eps,
            "converged": ell.converged,
            "d_eff": ell.d_eff,
            "distortion_bound": float(np.sqrt((1.0 + ell.eps) * ell.d_eff)),
        }
        return _distribution_root(pts, p), p, meta

    def distortion_bound_(self) -> float:
        """Certified worst-case distortion sqrt((1 + eps_achieved) * d_eff)."""
        check_is_fitted(self, "ellipsoid_")
        return float(np.sqrt((1.0 + self.ellipsoid_.eps) * self.ellipsoid_.d_eff))


@dataclass(frozen=True)
class DistortionReport:
    """Expansion and distortion of a fitted embedding over all pairs.

    ``worst_expansion`` is max ||f(x_i)-f(x_j)|| / ||x_i-x_j||^2 and should
    be <= 1 for a contraction; ``worst_case_distortion`` is the max of the
    inverse ratio; ``average_distortion`` is the ratio of (optionally
    demand-weighted) sums.  Coincident pairs are excluded from the ratios
    and contribute zero to the sums.
    """

    contraction_ok: bool
    worst_expansion: float
    worst_case_distortion: float
    average_distortion: float
    worst_expansion_pair: tuple
    worst_distortion_pair: tuple


def distortion_report(
    X,
    embedding,
    demand: Optional[WeightedGraph] = None,
    contraction_tol: float = 1e-9,
    noise_floor: float = 0.0,
) -> DistortionReport:
    """Measure contraction, worst-case, and average distortion of a fitted map.

    ``embedding`` may be a fitted estimator or a :class:`LinearEmbedding`.
    With a demand graph the sums in the average are weighted by d_ij;
    otherwise weights are uniform.

    ``noise_floor`` handles configurations that are only valid up to solver
    noise (e.g. points extracted from an SDP): pairs with squared distance
    at most noise_floor times the largest are treated like coincident pairs,
    excluded from the expansion/distortion ratios (contraction degrades
    additively with the validity residual, so ratios on pairs below the
    noise are meaningless).  The default 0.0 keeps the exact semantics.
    """
    pts = as_points(X)
    matrix = embedding.matrix if isinstance(embedding, LinearEmbedding) else embedding.matrix_
    n = pts.shape[0]
    rows, cols = pair_arrays(n)
    sq = np.sum((pts[rows] - pts[cols]) ** 2, axis=1)
    emb = embedded_pair_norms(matrix, pts)
    pos = sq > noise_floor * float(sq.max())
    if not np.any(pos):
        raise ValueError("all points coincide; distortion undefined")

    expansion = np.zeros_like(sq)
    np.divide(emb, sq, out=expansion, where=pos)
    k_exp = int(np.argmax(expansion))
    worst_expansion = float(expansion[k_exp])

    inv = np.zeros_like(sq)
    collapsed = pos & (emb <= 0)
    inv[pos & ~collapsed] = sq[pos & ~collapsed] / emb[pos & ~collapsed]
    inv[collapsed] = np.inf
    k_dist = int(np.argmax(inv))
    worst_distortion = float(inv[k_dist])

    w = demand.pair_weights if demand is not None else np.ones_like(sq)
    if demand is not None and demand.n != n:
        raise ValueError(f"demand graph has n={demand.n}, points have n={n}")
    denom = float(np.sum(w * emb))
    numer = float(np.sum(w * sq))
    average = numer / denom if denom > 0 else np.inf

    return DistortionReport(
        contraction_ok=bool(worst_expansion <= 1.0 + contraction_tol),
        worst_expansion=worst_expansion,
        worst_case_distortion=worst_distortion,
        average_distortion=average,
        worst_expansion_pair=(int(rows[k_exp]), int(cols[k_exp])),
        worst_distortion_pair=(int(rows[k_dist]), int(cols[k_dist])),
    )
