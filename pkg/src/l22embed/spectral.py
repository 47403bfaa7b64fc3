"""Spectra of difference matrices and graph Laplacian pencils.

Covers the singular value decomposition of difference matrices (stable rank,
top singular pair), graph Laplacians, generalized eigenvalues of the
cost/demand Laplacian pencil, and the von Neumann tail-mass bound relating
the two on SDP solutions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import WeightedGraph
from .pointset import DifferenceMatrix

#: Relative cutoff below which singular/eigen values count as zero.
RANK_RTOL = 1e-10


def numerical_rank(sigma: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Number of values above ``rtol`` times the largest."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma.max() <= 0:
        return 0
    return int(np.sum(sigma > rtol * sigma.max()))


@dataclass(frozen=True)
class DifferenceSpectrum:
    """Singular value decomposition summary of a difference matrix.

    ``stable_rank`` is ||M||_F^2 / sigma_1^2, a continuous proxy for the
    dimension actually occupied by the pairwise differences; it satisfies
    1 <= stable_rank <= rank(M) <= d.
    """

    sigma: np.ndarray  # all singular values, non-increasing
    u_top: np.ndarray  # top left singular vector, unit, R^d
    v_top: np.ndarray  # top right singular vector, unit, R^{C(n,2)}
    frob_sq: float
    stable_rank: float
    rank: int

    def tail_mass_fraction(self, r: int) -> float:
        """Fraction of squared singular mass beyond the top ``r`` values."""
        if r >= self.sigma.size:
            return 0.0
        if r < 0:
            raise ValueError("rank threshold must be >= 0")
        return float(np.sum(self.sigma[r:] ** 2) / np.sum(self.sigma**2))


def svd_spectrum(M: DifferenceMatrix | np.ndarray) -> DifferenceSpectrum:
    """Full SVD of a difference matrix with a deterministic sign convention.

    The top left singular vector is flipped so its first significantly
    nonzero coordinate is positive; the right vector follows so that
    M v = sigma_1 u is preserved.  Rejects the all-zero matrix, for which
    the stable rank is undefined.
    """
    A = M.matrix if isinstance(M, DifferenceMatrix) else np.asarray(M, dtype=float)
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    if S.size == 0 or S[0] <= 0.0:
        raise ValueError("difference matrix is zero; stable rank undefined")
    u = U[:, 0].copy()
    v = Vt[0, :].copy()
    nz = np.flatnonzero(np.abs(u) > 1e-12 * np.abs(u).max())
    if u[nz[0]] < 0:
        u = -u
        v = -v
    frob_sq = float(np.sum(S**2))
    return DifferenceSpectrum(
        sigma=S,
        u_top=u,
        v_top=v,
        frob_sq=frob_sq,
        stable_rank=frob_sq / float(S[0] ** 2),
        rank=numerical_rank(S),
    )


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Dense graph Laplacian: off-diagonal -w_ij, diagonal the vertex degree.

    Rows sum to zero (up to summation roundoff), so the all-ones vector lies
    in the kernel; the matrix is positive semidefinite.
    """
    W = g.matrix()
    L = -W
    L[np.diag_indices(g.n)] = W.sum(axis=1)
    return L


@dataclass(frozen=True)
class GeneralizedSpectrum:
    """Ascending finite generalized eigenvalues of the (L_cost, L_demand) pencil.

    Eigenvalues are computed on range(L_demand) after deflating the shared
    all-ones kernel; indexing is 1-based, lambda_1 the smallest retained
    value.  ``dropped_infinite`` counts kernel(L_demand) directions with
    nonzero cost action (eigenvalue +inf), which are not listed.
    """

    lambdas: np.ndarray
    dropped_infinite: int = 0

    def lambda_r(self, r: int) -> float:
        """The r-th smallest retained eigenvalue (1-based)."""
        if not 1 <= r <= self.lambdas.size:
            raise ValueError(f"r must be in 1..{self.lambdas.size}, got {r}")
        return float(self.lambdas[r - 1])

    def r_certificate(self, phi: float, delta: float) -> Optional[int]:
        """Smallest r with lambda_r >= phi / (1 - delta), or None.

        This is the rank threshold that certifies the r/delta rounding
        guarantee at mass fraction delta.
        """
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        threshold = phi / (1.0 - delta)
        idx = np.flatnonzero(self.lambdas >= threshold)
        if idx.size == 0:
            return None
        return int(idx[0]) + 1


def generalized_eigs(cost: WeightedGraph, demand: WeightedGraph) -> GeneralizedSpectrum:
    """Generalized eigenvalues of the cost/demand Laplacian pencil.

    Solves L_cost z = lambda L_demand z restricted to range(L_demand):
    with L_demand = Q diag(mu) Q^T and B the columns of Q with mu above the
    rank cutoff, the retained eigenvalues are those of
    (B mu^-1/2)^T L_cost (B mu^-1/2), sorted ascending.  Directions in
    kernel(L_demand) outside kernel(L_cost) have eigenvalue +inf and are
    dropped with a warning.
    """
    if cost.n != demand.n:
        raise ValueError(f"vertex count mismatch: cost n={cost.n}, demand n={demand.n}")
    LC = laplacian(cost)
    LD = laplacian(demand)
    mu, Q = np.linalg.eigh(LD)
    cutoff = RANK_RTOL * mu.max()
    keep = mu > cutoff
    if not np.any(keep):
        raise ValueError("demand Laplacian is numerically zero")
    dropped = 0
    if np.sum(~keep) > 1:  # kernel larger than span{1}: check for infinite eigenvalues
        K = Q[:, ~keep]
        action = np.linalg.norm(LC @ K, axis=0)
        scale = np.linalg.norm(LC, 2)
        dropped = int(np.sum(action > 1e-10 * max(scale, 1.0)))
        if dropped:
            warnings.warn(
                f"{dropped} demand-kernel direction(s) carry cost weight; "
                "their infinite generalized eigenvalues are dropped",
                stacklevel=2,
            )
    S = Q[:, keep] / np.sqrt(mu[keep])[None, :]
    T = S.T @ LC @ S
    lambdas = np.linalg.eigvalsh((T + T.T) / 2.0)
    return GeneralizedSpectrum(lambdas=np.sort(lambdas), dropped_infinite=dropped)


@dataclass(frozen=True)
class TailBoundReport:
    """Both sides of the von Neumann tail-mass inequality."""

    lhs: float
    rhs: float
    ok: bool


def von_neumann_check(
    spec: DifferenceSpectrum, r: int, phi_sdp: float, lambda_r1: float, tol: float = 1e-6
) -> TailBoundReport:
    """Check tail-mass fraction beyond index r against phi_sdp / lambda_{r+1}.

    For the demand-weighted difference matrix of a feasible SDP solution the
    squared singular mass beyond the top r values is at most
    phi_sdp / lambda_{r+1}, so the solution is approximately r-dimensional
    whenever lambda_{r+1} dominates the objective.
    """
    if lambda_r1 <= 0:
        raise ValueError("lambda_{r+1} must be positive")
    lhs = spec.tail_mass_fraction(r)
    rhs = phi_sdp / lambda_r1
    return TailBoundReport(lhs=lhs, rhs=rhs, ok=lhs <= rhs + tol)


@dataclass(frozen=True)
class StableRankBoundReport:
    """Stable rank against the r/delta bound implied by the tail-mass condition."""

    stable_rank: float
    bound: float
    precondition_ok: bool
    ok: bool


def stable_rank_bound(
    spec: DifferenceSpectrum, r: int, delta: float, tol: float = 1e-9
) -> StableRankBoundReport:
    """Check stable_rank <= r / delta given top-r mass fraction >= delta.

    When the top r squared singular values carry at least a delta fraction
    of the total mass, sigma_1^2 >= delta * total / r, hence
    stable rank <= r / delta.  A violated precondition is reported, not
    raised.
    """
    if r < 1:
        raise ValueError("rank threshold must be >= 1")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    head = 1.0 - spec.tail_mass_fraction(r)
    precondition_ok = bool(head >= delta)
    bound = r / delta
    return StableRankBoundReport(
        stable_rank=spec.stable_rank,
        bound=bound,
        precondition_ok=precondition_ok,
        ok=bool(spec.stable_rank <= bound + tol),
    )
