"""Origin-centered minimum-volume enclosing ellipsoid of the difference vectors.

The ellipsoid E = {x : x^T Q x <= 1} enclosing all pairwise differences
admits a John decomposition Q^{-1} = sum alpha_kl (x_k - x_l)(x_k - x_l)^T
with alpha >= 0 summing to the dimension of the difference span.  The
decomposition is computed by Khachiyan's multiplicative-weights iteration
with Wolfe-Atwood away steps, working inside the difference span so that
rank-deficient configurations get the stronger bound in their effective
dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pointset import DifferenceMatrix
from .spectral import RANK_RTOL

#: Refresh the maintained inverse from scratch this often (numerical hygiene).
_REFRESH_EVERY = 1000


@dataclass(frozen=True)
class EllipsoidResult:
    """Enclosing ellipsoid of the difference vectors, with design weights.

    ``Q`` defines E = {x : x^T Q x <= 1} in the ambient space (zero
    eigenvalues orthogonal to the difference span).  ``alpha`` are the John
    weights over canonical pairs: Q^{-1} = sum alpha_kl m_kl m_kl^T within
    the span, sum(alpha) = d_eff.  ``eps`` is the achieved convergence
    parameter: every difference satisfies m^T Q m <= 1 + eps and every pair
    with positive weight satisfies m^T Q m >= 1 - eps.
    """

    Q: np.ndarray
    alpha: np.ndarray
    eps: float
    d_eff: int
    converged: bool
    iterations: int
    span_basis: np.ndarray  # (d, d_eff) orthonormal columns spanning the differences

    def max_containment(self, M: DifferenceMatrix) -> float:
        """max over columns of m^T Q m (should be <= 1 + eps)."""
        vals = np.einsum("ij,ji->i", M.matrix.T @ self.Q, M.matrix)
        return float(vals.max())


def mvee_centered(
    M: DifferenceMatrix, eps: float = 1e-6, max_iter: int = 100_000
) -> EllipsoidResult:
    """Minimum-volume origin-centered ellipsoid enclosing the columns of M.

    Khachiyan iteration on the design weights w over columns: starting
    uniform, repeatedly pick the column with extremal
    kappa_k = m_k^T (sum_j w_j m_j m_j^T)^{-1} m_k and move the weights by
    the exact line-search step beta = (kappa/d_eff - 1)/(kappa - 1)
    (negative "away" steps shrink over-weighted interior columns, which
    gives linear convergence and near-tight complementary slackness).
    Terminates when max kappa <= (1+eps) d_eff and min kappa over the
    support >= (1-eps) d_eff.  Output: alpha = d_eff * w and
    Q = (d_eff * sum_j w_j m_j m_j^T)^{-1} within the span.

    If ``max_iter`` is exceeded the best iterate is returned flagged
    non-converged, with ``eps`` replaced by the achieved value.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    A = M.matrix
    U, S, _ = np.linalg.svd(A, full_matrices=False)
    d_eff = int(np.sum(S > RANK_RTOL * S[0])) if S.size and S[0] > 0 else 0
    if d_eff == 0:
        raise ValueError("difference matrix is zero; enclosing ellipsoid undefined")
    basis = U[:, :d_eff]
    Y = basis.T @ A  # (d_eff, m), full row rank
    D, m = d_eff, Y.shape[1]

    if D == 1:
        # one-dimensional optimum is closed-form: all weight on the longest
        # column (the exact line-search step would be beta = 1, which the
        # rank-one updates below cannot represent)
        k = int(np.argmax(np.abs(Y[0])))
        w = np.zeros(m)
        w[k] = 1.0
        Q = basis @ basis.T / Y[0, k] ** 2
        return EllipsoidResult(
            Q=(Q + Q.T) / 2.0,
            alpha=w,
            eps=0.0,
            d_eff=1,
            converged=True,
            iterations=0,
            span_basis=basis,
        )

    w = np.full(m, 1.0 / m)
    Hinv = np.linalg.inv((Y * w) @ Y.T)
    kappa = np.einsum("ij,ji->i", Y.T @ Hinv, Y)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        k_up = int(np.argmax(kappa))
        support = np.flatnonzero(w > 0)
        k_dn = int(support[np.argmin(kappa[support])])
        excess = kappa[k_up] - D
        deficit = D - kappa[k_dn] if support.size > 1 else 0.0
        if excess <= eps * D and deficit <= eps * D:
            converged = True
            break
        if excess >= deficit:
            k = k_up
            beta = (kappa[k] / D - 1.0) / (kappa[k] - 1.0)
        else:
            k = k_dn
            # line-search optimum is only valid for kappa > 1; otherwise drop fully
            beta = (kappa[k] / D - 1.0) / (kappa[k] - 1.0) if kappa[k] > 1.0 else -np.inf
            beta = max(beta, -w[k] / (1.0 - w[k]))
        z = Hinv @ Y[:, k]
        denom = (1.0 - beta) + beta * kappa[k]
        kappa = (kappa - (beta / denom) * (Y.T @ z) ** 2) / (1.0 - beta)
        Hinv = (Hinv - (beta / denom) * np.outer(z, z)) / (1.0 - beta)
        w *= 1.0 - beta
        w[k] += beta
        np.clip(w, 0.0, None, out=w)
        w /= w.sum()
        if iterations % _REFRESH_EVERY == 0:
            Hinv = np.linalg.inv((Y * w) @ Y.T)
            kappa = np.einsum("ij,ji->i", Y.T @ Hinv, Y)

    # Recompute the final state exactly so the certificate is trustworthy.
    H = (Y * w) @ Y.T
    Hinv = np.linalg.inv(H)
    kappa = np.einsum("ij,ji->i", Y.T @ Hinv, Y)
    support = np.flatnonzero(w > 0)
    achieved = max(
        float(kappa.max() / D - 1.0), float(1.0 - kappa[support].min() / D), 0.0
    )
    Q = basis @ (Hinv / D) @ basis.T
    return EllipsoidResult(
        Q=(Q + Q.T) / 2.0,
        alpha=D * w,
        eps=achieved,
        d_eff=D,
        converged=converged,
        iterations=iterations,
        span_basis=basis,
    )
