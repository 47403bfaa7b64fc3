"""Seeded generators of valid l2-squared point sets and sparsest-cut instances.

All randomness flows through ``numpy.random.default_rng`` (PCG64) so a spec
plus a 64-bit seed reproduces identical output bits across platforms.  Every
generated point set must pass the squared-distance triangle check at
relative tolerance 1e-12; the generators enforce this as a hard gate (the
SDP-derived kind is gated at the solver tolerance instead, since solver
noise exceeds 1e-12).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .graphs import WeightedGraph
from .pointset import PointSet, check_l22, num_pairs
from .sdp import SdpInstance

POINTSET_KINDS = ("hypercube_subset", "simplex", "line_sqrt", "l1_embeddable", "sdp_derived")
INSTANCE_KINDS = ("cycle", "complete", "dumbbell", "block_model")

GATE_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorSpec:
    """A generator kind with its parameters and seed.

    Identical spec + seed always produces identical output bits.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0


def _gate(pts: np.ndarray, tol: float = GATE_TOL) -> PointSet:
    report = check_l22(pts, tol=tol)
    if not report.ok:
        raise AssertionError(
            f"generator emitted an invalid configuration: triple {report.worst_triple} "
            f"violates by {report.worst_violation:.3e}"
        )
    return PointSet(pts, validated_l22=True)


def hypercube_subset(n: int, d: int, seed: int = 0) -> PointSet:
    """n distinct random vertices of the hypercube {0, 1}^d.

    Hypercube vertices realize a cut metric, so squared distances (Hamming)
    satisfy the triangle inequality exactly.
    """
    if n > 2**d:
        raise ValueError(f"cannot pick {n} distinct vertices from a {d}-cube")
    rng = np.random.default_rng(seed)
    chosen: dict = {}
    while len(chosen) < n:
        v = tuple(int(b) for b in rng.integers(0, 2, size=d))
        chosen.setdefault(v, None)
    return _gate(np.asarray(list(chosen), dtype=float))


def simplex(n: int, side: float = 1.0, seed: int = 0) -> PointSet:
    """Regular simplex on n vertices with the given side length."""
    if side <= 0:
        raise ValueError("side must be positive")
    # vertices side/sqrt(2) * e_i have pairwise distance `side` exactly
    pts = np.eye(n) * (side / np.sqrt(2.0))
    return _gate(pts)


def line_sqrt(s, seed: int = 0) -> PointSet:
    """Points realizing squared distances |s_i - s_j| for sorted positions s.

    A line metric is a non-negative combination of the cuts between
    consecutive positions, so vertex i maps to the vector of sqrt-gaps
    (sqrt(s_2 - s_1), ..., sqrt(s_i - s_{i-1}), 0, ...); then
    ||x_i - x_j||^2 = |s_i - s_j| exactly.
    """
    s = np.asarray(s, dtype=float)
    if s.size < 2:
        raise ValueError("need at least 2 positions")
    if not np.all(np.isfinite(s)):
        raise ValueError("positions must be finite reals")
    s = np.sort(s)
    gaps = np.diff(s)
    d = max(s.size - 1, 1)
    pts = np.zeros((s.size, d))
    root_gaps = np.sqrt(gaps)
    for i in range(1, s.size):
        pts[i, : i] = root_gaps[:i]
    return _gate(pts)


def l1_embeddable(n: int, cuts: int = 6, seed: int = 0) -> PointSet:
    """Random non-negative combination of cut semimetrics on n vertices.

    Each cut S_t with weight w_t contributes a coordinate sqrt(w_t) on the
    vertices of S_t, so squared distances are the weighted cut-metric sums.
    """
    rng = np.random.default_rng(seed)
    if n < 2 or cuts < 1:
        raise ValueError("need n >= 2 and cuts >= 1")
    coords = np.zeros((n, cuts))
    for t in range(cuts):
        while True:
            side = rng.integers(0, 2, size=n)
            if 0 < side.sum() < n:
                break
        coords[:, t] = np.sqrt(rng.uniform(0.1, 2.0)) * side
    return _gate(coords)


def sdp_derived(inst: SdpInstance, tol: float = 1e-6) -> PointSet:
    """Extracted points of the solved relaxation on the given instance.

    Gated at the solver tolerance (10 * tol) rather than 1e-12.
    """
    from .sdp import solve_sdp

    sol = solve_sdp(inst, tol=tol)
    if not sol.points.validated_l22:
        raise AssertionError("solver produced points beyond the solver-tolerance gate")
    return sol.points


def cycle_instance(n: int, demand: str = "uniform", seed: int = 0) -> SdpInstance:
    """Cycle cost graph with complete uniform (or random) demand."""
    return SdpInstance(WeightedGraph.cycle(n), _demand(n, demand, seed))


def complete_instance(n: int, demand: str = "uniform", seed: int = 0) -> SdpInstance:
    return SdpInstance(WeightedGraph.complete(n), _demand(n, demand, seed))


def dumbbell_instance(
    n: int, bridge_weight: float = 0.1, demand: str = "uniform", seed: int = 0
) -> SdpInstance:
    """Two cliques joined by a single light bridge edge."""
    if n < 4:
        raise ValueError("dumbbell needs n >= 4")
    half = n // 2
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            same = (a < half) == (b < half)
            if same:
                edges.append((a, b, 1.0))
    edges.append((0, half, float(bridge_weight)))
    return SdpInstance(WeightedGraph.from_edges(n, edges), _demand(n, demand, seed))


def block_model_instance(
    n: int,
    blocks: int = 2,
    intra_weight: float = 1.0,
    inter_weight: float = 0.01,
    demand: str = "uniform",
    seed: int = 0,
) -> SdpInstance:
    """r blocks with strong internal expansion and weak inter-block edges.

    Designed so that the r-th generalized eigenvalue of (cost, uniform
    demand) stays large while the relaxation value is small, which is the
    regime where the r/delta rounding guarantee is certified.
    """
    if blocks < 1 or n < 2 * blocks:
        raise ValueError("need at least 2 vertices per block")
    assign = np.sort(np.arange(n) % blocks)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            w = intra_weight if assign[a] == assign[b] else inter_weight
            if w > 0:
                edges.append((a, b, float(w)))
    return SdpInstance(WeightedGraph.from_edges(n, edges), _demand(n, demand, seed))


def _demand(n: int, kind: str, seed: int) -> WeightedGraph:
    if kind == "uniform":
        return WeightedGraph.complete(n)
    if kind == "random":
        rng = np.random.default_rng(seed)
        return WeightedGraph(n, rng.uniform(0.05, 1.0, size=num_pairs(n)))
    raise ValueError(f"unknown demand kind {kind!r}")


def gen_pointset(spec: GeneratorSpec) -> PointSet:
    """Dispatch a point-set generator spec."""
    p = dict(spec.params)
    if spec.kind == "hypercube_subset":
        return hypercube_subset(int(p.pop("n")), int(p.pop("d")), seed=spec.seed, **p)
    if spec.kind == "simplex":
        return simplex(int(p.pop("n")), seed=spec.seed, **p)
    if spec.kind == "line_sqrt":
        if "s" in p:
            return line_sqrt(p["s"], seed=spec.seed)
        rng = np.random.default_rng(spec.seed)
        n = int(p.pop("n"))
        return line_sqrt(np.cumsum(rng.uniform(0.0, 2.0, size=n)), seed=spec.seed)
    if spec.kind == "l1_embeddable":
        return l1_embeddable(int(p.pop("n")), seed=spec.seed, **p)
    if spec.kind == "sdp_derived":
        inst = gen_instance(GeneratorSpec(p.pop("instance_kind"), p, seed=spec.seed))
        return sdp_derived(inst)
    raise ValueError(f"unknown point-set kind {spec.kind!r} (expected one of {POINTSET_KINDS})")


def gen_instance(spec: GeneratorSpec) -> SdpInstance:
    """Dispatch an instance generator spec."""
    p = dict(spec.params)
    if spec.kind == "cycle":
        return cycle_instance(int(p.pop("n")), seed=spec.seed, **p)
    if spec.kind == "complete":
        return complete_instance(int(p.pop("n")), seed=spec.seed, **p)
    if spec.kind == "dumbbell":
        return dumbbell_instance(int(p.pop("n")), seed=spec.seed, **p)
    if spec.kind == "block_model":
        return block_model_instance(int(p.pop("n")), seed=spec.seed, **p)
    raise ValueError(f"unknown instance kind {spec.kind!r} (expected one of {INSTANCE_KINDS})")
