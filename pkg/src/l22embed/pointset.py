"""Point configurations in negative-type (l2-squared) geometry.

A point set x_1, ..., x_n in R^d is *l2-squared valid* when its squared
Euclidean distances obey the triangle inequality

    ||x_i - x_j||^2 + ||x_j - x_k||^2 >= ||x_i - x_k||^2    for all i, j, k.

This module holds the point-set container, the validity checker, the canonical
ordering of vertex pairs, and the difference matrix whose columns are the
pairwise differences x_i - x_j (optionally scaled by sqrt of demand weights).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ._validation import NotL22Error, as_points

#: Default relative tolerance for the squared-distance triangle check.
#: SDP solutions carry solver noise, so the default is loose relative to
#: float64 precision but tight relative to any real violation.
DEFAULT_L22_TOL = 1e-9


def num_pairs(n: int) -> int:
    """Number of unordered vertex pairs, C(n, 2)."""
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Column index of pair (i, j), i < j, in row-major upper-triangle order.

    The order is (0,1), (0,2), ..., (0,n-1), (1,2), ... so that
    ``pair_index`` is a bijection onto 0 .. C(n,2)-1, strictly increasing in
    lexicographic (i, j).
    """
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def pair_arrays(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index arrays (I, J) listing all pairs i < j in canonical order."""
    iu = np.triu_indices(n, 1)
    return iu[0], iu[1]


@dataclass(frozen=True)
class PointSet:
    """n points in R^d, a candidate l2-squared configuration.

    ``validated_l22`` records that :func:`check_l22` has passed; consumers
    that require validity (the embedding constructions) check the flag or
    re-validate.
    """

    points: np.ndarray
    validated_l22: bool = False

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def squared_distances(self) -> np.ndarray:
        """Symmetric (n, n) matrix of pairwise squared Euclidean distances.

        Computed from explicit differences (not the Gram matrix), which stays
        exact for configurations far from the origin.
        """
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    def translated(self, shift) -> "PointSet":
        """Same configuration with ``shift`` added to every point."""
        return replace(self, points=self.points + np.asarray(shift, dtype=float))


@dataclass(frozen=True)
class L22Report:
    """Outcome of the squared-distance triangle check."""

    ok: bool
    worst_triple: Optional[Tuple[int, int, int]]
    worst_violation: float
    tol: float
    scale: float


def check_l22(ps: PointSet | np.ndarray, tol: float = DEFAULT_L22_TOL) -> L22Report:
    """Check the squared-distance triangle inequality on all ordered triples.

    A triple (i, j, k) of distinct vertices violates when

        ||x_i - x_k||^2 - ||x_i - x_j||^2 - ||x_j - x_k||^2 > tol * scale

    with ``scale`` the maximum pairwise squared distance.  The report carries
    the most violated triple either way (ties broken by smallest
    lexicographic (i, j, k), so the result is schedule-independent); sets
    with fewer than three distinct indices pass trivially.
    """
    pts = as_points(ps)
    ps = ps if isinstance(ps, PointSet) else PointSet(pts)
    n = ps.n
    d2 = ps.squared_distances()
    scale = float(d2.max())
    if n < 3 or scale == 0.0:
        return L22Report(True, None, -np.inf if n < 3 else 0.0, tol, scale)
    # violation[i, j, k] = d2(i,k) - d2(i,j) - d2(j,k); only distinct triples count
    viol = d2[:, None, :] - d2[:, :, None] - d2[None, :, :]
    idx = np.arange(n)
    distinct = (
        (idx[:, None, None] != idx[None, :, None])
        & (idx[None, :, None] != idx[None, None, :])
        & (idx[:, None, None] != idx[None, None, :])
    )
    viol = np.where(distinct, viol, -np.inf)
    flat = int(np.argmax(viol))  # first occurrence = smallest lexicographic triple
    worst = np.unravel_index(flat, viol.shape)
    worst_violation = float(viol[worst])
    ok = worst_violation <= tol * scale
    return L22Report(ok, tuple(int(v) for v in worst), worst_violation, tol, scale)


def validated(ps: PointSet | np.ndarray, tol: float = DEFAULT_L22_TOL) -> PointSet:
    """Return the point set flagged ``validated_l22``, or raise :class:`NotL22Error`."""
    ps = ps if isinstance(ps, PointSet) else PointSet(as_points(ps))
    report = check_l22(ps, tol)
    if not report.ok:
        raise NotL22Error(
            f"triple {report.worst_triple} violates the squared-distance triangle "
            f"inequality by {report.worst_violation:.3e} (tol {tol:g} * scale {report.scale:.3e})"
        )
    return replace(ps, validated_l22=True)


@dataclass(frozen=True)
class DifferenceMatrix:
    """Matrix with one column per vertex pair, in canonical pair order.

    Column ``pair_index(i, j, n)`` is ``x_i - x_j`` (times ``sqrt(w_ij)`` for
    the demand-weighted variant).  Zero-weight pairs keep their (zero)
    columns so column indices always align with the canonical pair order.
    """

    matrix: np.ndarray  # (d, C(n, 2))
    n: int
    pair_scales: Optional[np.ndarray] = None  # sqrt of demand weights, if weighted

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    @property
    def weighted(self) -> bool:
        return self.pair_scales is not None

    def pair_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return pair_arrays(self.n)

    def frobenius_sq(self) -> float:
        return float(np.sum(self.matrix**2))


def difference_matrix(ps: PointSet | np.ndarray) -> DifferenceMatrix:
    """The d x C(n,2) matrix of pairwise differences x_i - x_j, i < j."""
    pts = as_points(ps)
    n = pts.shape[0]
    rows, cols = pair_arrays(n)
    return DifferenceMatrix((pts[rows] - pts[cols]).T, n)


def weighted_difference_matrix(ps: PointSet | np.ndarray, demand) -> DifferenceMatrix:
    """Differences scaled columnwise by sqrt(d_ij) of the demand graph."""
    pts = as_points(ps)
    n = pts.shape[0]
    if demand.n != n:
        raise ValueError(f"demand graph has n={demand.n}, point set has n={n}")
    w = demand.pair_weights
    if np.any(w < 0):
        raise ValueError("demand weights must be non-negative")
    rows, cols = pair_arrays(n)
    scales = np.sqrt(w)
    return DifferenceMatrix((pts[rows] - pts[cols]).T * scales[None, :], n, pair_scales=scales)
