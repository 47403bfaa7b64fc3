"""Core geometry: pair indexing, validity checking, difference matrices."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l22embed import (
    NotL22Error,
    PointSet,
    check_l22,
    difference_matrix,
    pair_index,
    validated,
    weighted_difference_matrix,
)
from l22embed.graphs import WeightedGraph
from l22embed.pointset import num_pairs, pair_arrays

from conftest import random_demand


class TestPairIndex:
    @pytest.mark.parametrize(
        "i,j,n,expected",
        [(0, 1, 4, 0), (0, 3, 4, 2), (2, 3, 4, 5), (0, 1, 2, 0), (1, 2, 3, 2)],
    )
    def test_known_values(self, i, j, n, expected):
        assert pair_index(i, j, n) == expected

    def test_bijection_exhaustive_to_64(self):
        for n in range(2, 65):
            seen = [pair_index(i, j, n) for i in range(n) for j in range(i + 1, n)]
            assert seen == list(range(num_pairs(n)))  # strictly increasing lexicographic

    @given(st.integers(min_value=2, max_value=512))
    def test_bijection_large_n(self, n):
        ks = {pair_index(i, j, n) for i in range(min(n, 8)) for j in range(i + 1, min(n, 8))}
        assert len(ks) == num_pairs(min(n, 8))
        assert pair_index(n - 2, n - 1, n) == num_pairs(n) - 1

    def test_matches_pair_arrays(self):
        for n in (2, 3, 7, 12):
            rows, cols = pair_arrays(n)
            for k, (i, j) in enumerate(zip(rows, cols)):
                assert pair_index(int(i), int(j), n) == k

    @pytest.mark.parametrize("i,j,n", [(1, 1, 3), (2, 1, 3), (0, 3, 3), (-1, 1, 3)])
    def test_rejects_bad_pairs(self, i, j, n):
        with pytest.raises(ValueError):
            pair_index(i, j, n)


class TestCheckL22:
    def test_hypercube_is_valid(self, square):
        report = check_l22(square, tol=0.0)
        assert report.ok

    def test_collinear_violation_is_two(self, collinear):
        # direct arithmetic: d(0,2) - d(0,1) - d(1,2) = 4 - 1 - 1 = 2
        report = check_l22(collinear)
        assert not report.ok
        assert report.worst_violation == pytest.approx(2.0, abs=1e-12)
        assert report.worst_triple == (0, 1, 2)

    def test_two_points_trivially_valid(self, two_points):
        assert check_l22(two_points).ok

    def test_duplicate_points_pass(self):
        pts = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
        assert check_l22(pts).ok

    def test_validated_flags_and_raises(self, square, collinear):
        assert validated(square).validated_l22
        with pytest.raises(NotL22Error):
            validated(collinear)

    def test_generated_sets_pass_at_zero_tol(self, small_corpus):
        for ps in small_corpus:
            report = check_l22(ps, tol=0.0)
            # floating-point scale 1e-12 on exact constructions
            assert report.worst_violation <= 1e-12 * max(report.scale, 1.0)


class TestDifferenceMatrix:
    def test_two_points_single_column(self, two_points):
        M = difference_matrix(two_points)
        assert M.matrix.shape == (1, 1)
        assert M.matrix[0, 0] == -3.0  # x_0 - x_1 with x_0=0, x_1=3

    def test_square_frobenius(self, square):
        # hand sum of squared lengths: 1 + 1 + 2 + 2 + 1 + 1 = 8
        M = difference_matrix(square)
        assert M.m == 6
        assert M.frobenius_sq() == pytest.approx(8.0, rel=1e-12)

    def test_frobenius_equals_pairwise_sum(self, small_corpus):
        for ps in small_corpus:
            M = difference_matrix(ps)
            rows, cols = pair_arrays(ps.n)
            direct = float(np.sum((ps.points[rows] - ps.points[cols]) ** 2))
            assert M.frobenius_sq() == pytest.approx(direct, rel=1e-12)

    def test_canonical_column_content(self, square):
        M = difference_matrix(square)
        pts = square.points
        for k, (i, j) in enumerate(zip(*pair_arrays(4))):
            assert np.array_equal(M.matrix[:, k], pts[i] - pts[j])

    def test_translation_invariance(self, small_corpus):
        for ps in small_corpus[:6]:
            M0 = difference_matrix(ps)
            M1 = difference_matrix(ps.translated(np.full(ps.d, 3.7)))
            assert np.allclose(M0.matrix, M1.matrix, atol=1e-12)


class TestWeightedDifferenceMatrix:
    def test_uniform_demand_matches_plain(self, square):
        demand = WeightedGraph.complete(4)
        Mw = weighted_difference_matrix(square, demand)
        M = difference_matrix(square)
        assert np.allclose(Mw.matrix, M.matrix)

    def test_single_pair_weight_four_doubles_column(self, square):
        w = np.zeros(6)
        w[pair_index(0, 3, 4)] = 4.0
        demand = WeightedGraph(4, w)
        Mw = weighted_difference_matrix(square, demand)
        M = difference_matrix(square)
        k = pair_index(0, 3, 4)
        assert np.allclose(Mw.matrix[:, k], 2.0 * M.matrix[:, k])
        others = [c for c in range(6) if c != k]
        assert np.all(Mw.matrix[:, others] == 0.0)

    def test_weighted_frobenius_identity(self, small_corpus):
        for idx, ps in enumerate(small_corpus[:8]):
            demand = random_demand(ps.n, seed=idx, sparse=True)
            Mw = weighted_difference_matrix(ps, demand)
            rows, cols = pair_arrays(ps.n)
            sq = np.sum((ps.points[rows] - ps.points[cols]) ** 2, axis=1)
            assert Mw.frobenius_sq() == pytest.approx(
                float(np.sum(demand.pair_weights * sq)), rel=1e-12
            )

    def test_mismatched_n_rejected(self, square):
        with pytest.raises(ValueError):
            weighted_difference_matrix(square, WeightedGraph.complete(5))


def test_pointset_validates_shape():
    with pytest.raises(ValueError):
        PointSet(np.ones(3))
    with pytest.raises(ValueError):
        PointSet(np.ones((1, 2)))
    with pytest.raises(ValueError):
        PointSet(np.array([[np.inf, 0.0], [0.0, 0.0]]))
