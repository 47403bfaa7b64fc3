"""Shared input-validation helpers."""

from __future__ import annotations

import numpy as np


class NotL22Error(ValueError):
    """Raised when a point configuration violates the squared-distance triangle inequality."""


def as_points(X) -> np.ndarray:
    """Coerce ``X`` to a finite float64 array of shape (n, d) with n >= 2, d >= 1.

    Accepts anything exposing a ``points`` attribute (e.g. :class:`PointSet`)
    or array-like rows of coordinates.
    """
    if hasattr(X, "points"):
        X = X.points
    pts = np.asarray(X, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"expected a 2-d array of points, got shape {pts.shape}")
    n, d = pts.shape
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if d < 1:
        raise ValueError("ambient dimension must be >= 1")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def as_pair_weights(p, m: int, *, name: str = "pair_weights") -> np.ndarray:
    """Coerce to a non-negative vector over the canonical pairs, length ``m``."""
    w = np.asarray(p, dtype=float).ravel()
    if w.shape != (m,):
        raise ValueError(f"{name} must have length {m}, got {w.shape[0]}")
    if not np.all(np.isfinite(w)):
        raise ValueError(f"{name} must be finite")
    if np.any(w < 0):
        raise ValueError(f"{name} must be non-negative")
    return w


def check_distribution(p: np.ndarray, *, tol: float = 1e-12) -> np.ndarray:
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"pair distribution must sum to 1 (got {total!r})")
    return p


def check_same_n(n: int, *objs) -> None:
    for obj in objs:
        if obj is not None and obj.n != n:
            raise ValueError(f"vertex count mismatch: expected n={n}, got n={obj.n}")
