"""Desk-scale solver for the sparsest-cut semidefinite relaxation.

The relaxation optimizes over Gram matrices X of point configurations:

    minimize    sum_{i<j} c_ij ||x_i - x_j||^2   ( = tr(L_cost X) )
    subject to  squared-distance triangle inequalities on all triples,
                sum_{k<l} d_kl ||x_k - x_l||^2 = 1,
                X positive semidefinite.

Solutions are solved by an interior-point conic solver, re-verified against
the constraints, and factored into an explicit point configuration.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import Cut, WeightedGraph
from .pointset import PointSet, check_l22
from .spectral import laplacian, numerical_rank

#: Largest instance the dense solver accepts.
MAX_N = 40

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 200_000


@dataclass(frozen=True)
class SdpInstance:
    """A sparsest-cut instance: cost and demand graphs on the same vertices."""

    cost: WeightedGraph
    demand: WeightedGraph

    def __post_init__(self):
        if self.cost.n != self.demand.n:
            raise ValueError(
                f"cost graph has n={self.cost.n}, demand graph has n={self.demand.n}"
            )
        if self.cost.n > MAX_N:
            raise ValueError(f"instance size n={self.cost.n} exceeds cap {MAX_N}")

    @property
    def n(self) -> int:
        return self.cost.n


@dataclass(frozen=True)
class SdpResiduals:
    """Constraint residuals recomputed directly from a Gram matrix."""

    triangle: float
    normalization: float
    min_eigenvalue: float


@dataclass(frozen=True)
class SdpSolution:
    """Solved relaxation: Gram matrix, extracted points, objective, residuals."""

    gram: np.ndarray
    points: PointSet
    phi_sdp: float
    residuals: SdpResiduals
    converged: bool
    tol: float
    solver: str = ""
    iterations: int = 0

    @property
    def n(self) -> int:
        return self.gram.shape[0]


def _triangle_triples(n: int) -> np.ndarray:
    """All ordered triples (i, j, k), j the midpoint, one row per inequality."""
    trips = []
    for a, b, c in itertools.combinations(range(n), 3):
        trips.extend(((a, b, c), (b, a, c), (a, c, b)))
    return np.asarray(trips, dtype=int).reshape(-1, 3)


def _pair_sq(X: np.ndarray) -> np.ndarray:
    dg = np.diag(X)
    return dg[:, None] + dg[None, :] - 2.0 * X


def gram_residuals(X: np.ndarray, demand: WeightedGraph) -> SdpResiduals:
    """Max triangle violation, normalization error, and min eigenvalue of X."""
    n = X.shape[0]
    d2 = _pair_sq(X)
    trips = _triangle_triples(n)
    i, j, k = trips[:, 0], trips[:, 1], trips[:, 2]
    tri = float(np.max(d2[i, k] - d2[i, j] - d2[j, k])) if len(trips) else 0.0
    norm_err = float(abs(np.sum(laplacian(demand) * X) - 1.0))
    min_eig = float(np.linalg.eigvalsh((X + X.T) / 2.0).min())
    return SdpResiduals(triangle=max(tri, 0.0), normalization=norm_err, min_eigenvalue=min_eig)


def objective_value(X: np.ndarray, cost: WeightedGraph) -> float:
    return float(np.sum(laplacian(cost) * X))


def solve_sdp(
    inst: SdpInstance,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    log_path: Optional[str] = None,
) -> SdpSolution:
    """Solve the relaxation and extract the point configuration.

    Runs cvxpy with the Clarabel interior-point backend (SCS as fallback),
    then recomputes all residuals directly from the returned Gram matrix;
    ``converged`` requires solver success and residuals within ``tol``.
    Deterministic for fixed (instance, tol, max_iter).
    """
    import cvxpy as cp

    n = inst.n
    if inst.demand.total_weight() <= 0:
        raise ValueError("demand graph has zero total weight")
    LC = laplacian(inst.cost)
    LD = laplacian(inst.demand)
    trips = _triangle_triples(n)
    i, j, k = trips[:, 0], trips[:, 1], trips[:, 2]

    def build():
        X = cp.Variable((n, n), PSD=True)
        dg = cp.diag(X)

        def sq(a, b):
            return dg[a] + dg[b] - 2.0 * X[a, b]

        constraints = [cp.sum(cp.multiply(LD, X)) == 1.0]
        if len(trips):
            constraints.append(sq(i, k) - sq(i, j) - sq(j, k) <= 0)
        return cp.Problem(cp.Minimize(cp.sum(cp.multiply(LC, X))), constraints), X

    # Deterministic cascade, tightest first; a fresh problem per attempt is
    # required because a failed solve poisons retries.  "Inaccurate" exits
    # are accepted only where the attempt's reduced tolerances are still far
    # tighter than any consumer needs (1e-10); otherwise they are kept as a
    # last resort.
    ipm_iters = min(max_iter, 10_000)
    attempts = [
        (
            "CLARABEL",
            dict(
                solver=cp.CLARABEL,
                max_iter=ipm_iters,
                tol_gap_abs=1e-12,
                tol_gap_rel=1e-12,
                tol_feas=1e-12,
                reduced_tol_gap_abs=1e-10,
                reduced_tol_gap_rel=1e-10,
                reduced_tol_feas=1e-10,
            ),
            True,
        ),
        (
            "CLARABEL",
            dict(
                solver=cp.CLARABEL,
                max_iter=ipm_iters,
                tol_gap_abs=1e-11,
                tol_gap_rel=1e-11,
                tol_feas=1e-11,
            ),
            False,
        ),
        ("SCS", dict(solver=cp.SCS, eps=1e-12, max_iters=min(max_iter, 100_000)), False),
        ("CLARABEL", dict(solver=cp.CLARABEL, max_iter=ipm_iters), True),
        ("SCS", dict(solver=cp.SCS, eps=1e-9, max_iters=max_iter), True),
    ]
    problem = Xv = fallback = None
    solver = ""
    import warnings as _warnings

    for attempt_solver, options, accept_inaccurate in attempts:
        problem, X = build()
        try:
            with _warnings.catch_warnings():
                _warnings.filterwarnings("ignore", message="Solution may be inaccurate")
                problem.solve(**options)
        except (cp.error.SolverError, ValueError):
            continue
        if X.value is None:
            continue
        value = np.asarray((X.value + X.value.T) / 2.0)
        if problem.status == cp.OPTIMAL or (
            problem.status == cp.OPTIMAL_INACCURATE and accept_inaccurate
        ):
            Xv, solver = value, attempt_solver
            break
        if fallback is None and problem.status == cp.OPTIMAL_INACCURATE:
            fallback = (value, attempt_solver)
    if Xv is None and fallback is not None:
        Xv, solver = fallback
    if Xv is None:
        raise RuntimeError(f"SDP solver failed with status {problem.status!r}")
    residuals = gram_residuals(Xv, inst.demand)
    phi = objective_value(Xv, inst.cost)
    iterations = _solver_iterations(problem)
    converged = (
        problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
        and residuals.triangle <= tol
        and residuals.normalization <= tol
        and residuals.min_eigenvalue >= -tol
    )
    if log_path is not None:
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "iter": iterations,
                        "objective": phi,
                        "max_residual": max(
                            residuals.triangle,
                            residuals.normalization,
                            -min(residuals.min_eigenvalue, 0.0),
                        ),
                    }
                )
                + "\n"
            )
    points = extract_points_from_gram(Xv, tol)
    return SdpSolution(
        gram=Xv,
        points=points,
        phi_sdp=phi,
        residuals=residuals,
        converged=converged,
        tol=tol,
        solver=solver,
        iterations=iterations,
    )


def _solver_iterations(problem) -> int:
    stats = problem.solver_stats
    if stats is not None and stats.num_iters is not None:
        return int(stats.num_iters)
    return 0


def extract_points_from_gram(X: np.ndarray, tol: float = DEFAULT_TOL) -> PointSet:
    """Factor X = VV^T into points (rows of V), clamping negative eigenvalues.

    The ambient dimension is the numerical rank of X.  The result is flagged
    validated when the squared-distance triangle check passes at 10 * tol;
    the Gram matrix of the extracted points reproduces X up to the clamped
    eigenvalue mass.
    """
    X = np.asarray(X, dtype=float)
    vals, vecs = np.linalg.eigh((X + X.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    rank = max(numerical_rank(vals), 1)
    order = np.argsort(vals)[::-1][:rank]
    pts = vecs[:, order] * np.sqrt(vals[order])[None, :]
    report = check_l22(pts, tol=10.0 * tol)
    return PointSet(pts, validated_l22=report.ok)


def extract_points(sol: SdpSolution) -> PointSet:
    """Points of a solved relaxation (already computed during the solve)."""
    return sol.points


def cut_gram(cut: Cut, demand: WeightedGraph) -> np.ndarray:
    """Feasible Gram matrix of a cut: scaled indicator vectors.

    The objective of this matrix against any cost graph equals the cut's
    sparsity, which makes it a handy feasibility/sanity oracle for the
    solver.
    """
    sep = cut.separated_pairs()
    cut_demand = float(demand.pair_weights[sep].sum())
    if cut_demand <= 0:
        raise ValueError("cut separates zero demand")
    ind = cut.indicator() / np.sqrt(cut_demand)
    return np.outer(ind, ind)


def save_solution(path: str, sol: SdpSolution) -> None:
    """Write the Gram JSON {n, X, phi_sdp} with round-trip float precision."""
    payload = {
        "n": sol.n,
        "X": sol.gram.tolist(),
        "phi_sdp": sol.phi_sdp,
        "tol": sol.tol,
        "solver": sol.solver,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_solution(path: str, inst: SdpInstance) -> SdpSolution:
    """Load a Gram JSON and re-verify every invariant against the instance.

    Residuals are recomputed, never trusted from the file; a mismatch in the
    recorded objective, an infeasible normalization, a triangle violation, or
    an indefinite Gram matrix is rejected naming the violated constraint.
    """
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key in ("n", "X", "phi_sdp"):
        if key not in payload:
            raise ValueError(f"Gram JSON missing field {key!r}")
    n = int(payload["n"])
    if n != inst.n:
        raise ValueError(f"file has n={n}, instance has n={inst.n}")
    X = np.asarray(payload["X"], dtype=float)
    if X.shape != (n, n):
        raise ValueError(f"X must be {n}x{n}, got {X.shape}")
    if not np.allclose(X, X.T, atol=1e-12 * max(1.0, float(np.abs(X).max()))):
        raise ValueError("X must be symmetric")
    tol = float(payload.get("tol", DEFAULT_TOL))
    phi_recorded = float(payload["phi_sdp"])
    phi = objective_value(X, inst.cost)
    if abs(phi - phi_recorded) > 1e-8 * max(1.0, abs(phi)):
        raise ValueError(
            f"recorded objective {phi_recorded!r} disagrees with recomputed {phi!r}"
        )
    residuals = gram_residuals(X, inst.demand)
    scale = float(np.abs(X).max())
    if residuals.min_eigenvalue < -1e-8 * max(scale, 1.0):
        raise ValueError(f"X is not positive semidefinite (min eig {residuals.min_eigenvalue:.3e})")
    if residuals.normalization > tol:
        raise ValueError(f"demand normalization violated by {residuals.normalization:.3e}")
    if residuals.triangle > tol:
        raise ValueError(f"triangle inequality violated by {residuals.triangle:.3e}")
    points = extract_points_from_gram(X, tol)
    return SdpSolution(
        gram=X,
        points=points,
        phi_sdp=phi,
        residuals=residuals,
        converged=True,
        tol=tol,
        solver=str(payload.get("solver", "file")),
    )
