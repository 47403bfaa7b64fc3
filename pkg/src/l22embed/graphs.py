"""Weighted graphs on vertex pairs, cuts, and cut sparsity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np

from .pointset import num_pairs, pair_arrays, pair_index


@dataclass(frozen=True)
class WeightedGraph:
    """Non-negative edge weights on the unordered pairs of n vertices.

    Weights are stored densely over the canonical pair order (see
    :func:`pair_index`); absent edges are zeros.  Serves both as a cost graph
    and as a demand graph.
    """

    n: int
    pair_weights: np.ndarray  # (C(n, 2),)

    def __post_init__(self):
        w = np.asarray(self.pair_weights, dtype=float).ravel()
        if self.n < 2:
            raise ValueError("graph needs at least 2 vertices")
        if w.shape != (num_pairs(self.n),):
            raise ValueError(
                f"expected {num_pairs(self.n)} pair weights for n={self.n}, got {w.shape[0]}"
            )
        if not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite")
        if np.any(w < 0):
            raise ValueError("edge weights must be non-negative")
        if w.sum() <= 0:
            raise ValueError("total edge weight must be positive")
        object.__setattr__(self, "pair_weights", w)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int, float]]) -> "WeightedGraph":
        """Build from (i, j, w) triples with i < j; duplicate pairs are rejected."""
        w = np.zeros(num_pairs(n))
        seen = set()
        for i, j, wij in edges:
            k = pair_index(int(i), int(j), n)
            if k in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add(k)
            w[k] = wij
        return cls(n, w)

    @classmethod
    def complete(cls, n: int, weight: float = 1.0) -> "WeightedGraph":
        return cls(n, np.full(num_pairs(n), float(weight)))

    @classmethod
    def cycle(cls, n: int, weight: float = 1.0) -> "WeightedGraph":
        edges = [(i, i + 1, weight) for i in range(n - 1)]
        if n > 2:
            edges.append((0, n - 1, weight))
        return cls.from_edges(n, edges)

    def weight(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return float(self.pair_weights[pair_index(i, j, self.n)])

    def total_weight(self) -> float:
        return float(self.pair_weights.sum())

    def matrix(self) -> np.ndarray:
        """Symmetric (n, n) weight matrix with zero diagonal."""
        W = np.zeros((self.n, self.n))
        rows, cols = pair_arrays(self.n)
        W[rows, cols] = self.pair_weights
        W[cols, rows] = self.pair_weights
        return W

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Yield (i, j, w) for pairs with nonzero weight, in canonical order."""
        rows, cols = pair_arrays(self.n)
        for i, j, w in zip(rows, cols, self.pair_weights):
            if w != 0.0:
                yield int(i), int(j), float(w)

    def scaled(self, gamma: float) -> "WeightedGraph":
        return WeightedGraph(self.n, self.pair_weights * float(gamma))

    def permuted(self, perm: np.ndarray) -> "WeightedGraph":
        """Relabel vertices: new vertex perm[i] plays the role of old vertex i."""
        perm = np.asarray(perm, dtype=int)
        return WeightedGraph.from_edges(
            self.n,
            (
                (min(perm[i], perm[j]), max(perm[i], perm[j]), w)
                for i, j, w in self.edges()
            ),
        )


@dataclass(frozen=True)
class Cut:
    """A nonempty proper vertex subset S of {0, ..., n-1}."""

    n: int
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(v) for v in self.members)))
        if not members:
            raise ValueError("cut must be nonempty")
        if len(members) >= self.n:
            raise ValueError("cut must be a proper subset")
        if members[0] < 0 or members[-1] >= self.n:
            raise ValueError("cut members out of range")
        object.__setattr__(self, "members", members)

    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.n)
        ind[list(self.members)] = 1.0
        return ind

    def complement(self) -> "Cut":
        rest = tuple(v for v in range(self.n) if v not in set(self.members))
        return Cut(self.n, rest)

    def separated_pairs(self) -> np.ndarray:
        """Boolean mask over canonical pairs: True where the cut separates i and j."""
        ind = self.indicator()
        rows, cols = pair_arrays(self.n)
        return ind[rows] != ind[cols]


@dataclass(frozen=True)
class CutResult:
    """A cut with its cost, demand, and sparsity cost/demand.

    A cut separating zero demand is infeasible; its sparsity is +inf
    (never NaN).
    """

    cut: Cut
    cut_cost: float
    cut_demand: float
    sparsity: float

    @property
    def feasible(self) -> bool:
        return self.cut_demand > 0.0


def cut_sparsity(cut: Cut, cost: WeightedGraph, demand: WeightedGraph) -> CutResult:
    """Evaluate cost, demand, and sparsity of the pairs separated by the cut."""
    if cost.n != cut.n or demand.n != cut.n:
        raise ValueError(
            f"vertex count mismatch: cut n={cut.n}, cost n={cost.n}, demand n={demand.n}"
        )
    sep = cut.separated_pairs()
    cut_cost = float(cost.pair_weights[sep].sum())
    cut_demand = float(demand.pair_weights[sep].sum())
    sparsity = cut_cost / cut_demand if cut_demand > 0.0 else np.inf
    return CutResult(cut, cut_cost, cut_demand, sparsity)
