import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from experttest.core import Dataset, DistanceMetric, derive_seed
from experttest.matching import (
    InstanceTooLarge,
    Matching,
    TooManyPairs,
    brute_force_optimal_matching,
    greedy_match,
    pair_distance_summary,
)

L2 = DistanceMetric.euclidean()


def points(xs):
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    n = len(xs)
    return Dataset(xs, np.zeros(n), np.zeros(n))


class TestGreedyMatch:
    def test_line_example(self):
        # hand enumeration over the three disjoint 2-matchings of these points
        d = points([0.0, 0.1, 1.0, 1.05])
        m = greedy_match(d, 2, L2)
        assert m.pairs == ((2, 3), (0, 1))
        assert m.distances == pytest.approx((0.05, 0.1))
        assert m.mismatch_count == 2

    def test_duplicate_points_match_at_zero(self):
        d = points([3.0, 3.0, 9.0])
        m = greedy_match(d, 1, L2)
        assert m.pairs == ((0, 1),)
        assert m.distances == (0.0,)
        assert m.mismatch_count == 0

    def test_too_many_pairs(self):
        d = points([0.0, 1.0, 2.0])
        with pytest.raises(TooManyPairs):
            greedy_match(d, 2, L2)

    def test_l_must_be_positive(self):
        with pytest.raises(ValueError):
            greedy_match(points([0.0, 1.0]), 0, L2)

    def test_ties_broken_by_lexicographic_index(self):
        d = points([5.0, 5.0, 5.0, 5.0])
        m = greedy_match(d, 2, L2)
        assert m.pairs == ((0, 1), (2, 3))

    def test_odd_record_left_unmatched(self):
        d = points([0.0, 0.4, 10.0, 10.3, 99.0])
        m = greedy_match(d, 2, L2)
        used = {i for pair in m.pairs for i in pair}
        assert 4 not in used

    def test_discretized_features_pair_exactly(self):
        # many duplicated rows in a small discrete feature space: a large
        # matching is still made entirely of identical pairs
        rng = np.random.default_rng(2024)
        x = rng.integers(0, 2, size=(2600, 9)).astype(float)
        d = Dataset(x, rng.integers(0, 2, 2600).astype(float), rng.integers(0, 2, 2600).astype(float))
        m = greedy_match(d, 1000, L2)
        assert m.mismatch_count == 0

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_disjoint_and_monotone(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 40))
        dim = int(rng.integers(1, 4))
        d = points(rng.random((n, dim)))
        L = int(rng.integers(1, n // 2 + 1))
        m = greedy_match(d, L, L2)
        flat = [i for pair in m.pairs for i in pair]
        assert len(flat) == len(set(flat)) == 2 * L
        assert all(a <= b for a, b in zip(m.distances, m.distances[1:]))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_prefix_equals_smaller_run(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 30))
        d = points(rng.random((n, 2)))
        big = greedy_match(d, n // 2, L2)
        L = int(rng.integers(1, n // 2 + 1))
        assert big.prefix(L) == greedy_match(d, L, L2)


class TestBruteForceOracle:
    def test_line_example(self):
        assert brute_force_optimal_matching(points([0.0, 0.1, 1.0, 1.05]), 2, L2) == pytest.approx(0.1)

    def test_single_pair_is_min_distance(self):
        rng = np.random.default_rng(8)
        x = rng.random((7, 2))
        d = points(x)
        expected = min(
            L2.distance(x[i], x[j]) for i in range(7) for j in range(i + 1, 7)
        )
        assert brute_force_optimal_matching(d, 1, L2) == pytest.approx(expected)

    def test_instance_cap(self):
        d = points(np.arange(15.0))
        with pytest.raises(InstanceTooLarge):
            brute_force_optimal_matching(d, 2, L2)

    def test_greedy_bounded_by_double_size_optimum(self):
        rng = np.random.default_rng(11)
        d = points(rng.random((8, 2)))
        greedy = greedy_match(d, 2, L2)
        assert max(greedy.distances) <= brute_force_optimal_matching(d, 4, L2) + 1e-12


class TestMatchingType:
    def test_rejects_overlapping_pairs(self):
        with pytest.raises(ValueError):
            Matching.from_pairs([(0, 1), (1, 2)], [0.0, 0.0])

    def test_rejects_decreasing_distances(self):
        with pytest.raises(ValueError):
            Matching.from_pairs([(0, 1), (2, 3)], [1.0, 0.5])

    def test_mismatch_count_checked(self):
        with pytest.raises(ValueError):
            Matching(((0, 1),), (0.5,), 0)

    def test_empty_matching_allowed(self):
        m = Matching.from_pairs([], [])
        assert len(m) == 0 and m.max_distance == 0.0


class TestPairDistanceSummary:
    def test_all_duplicates(self):
        d = points([1.0, 1.0, 2.0, 2.0])
        s = pair_distance_summary(greedy_match(d, 2, L2))
        assert s.maximum == 0.0 and s.zero_count == 2

    def test_line_example(self):
        s = pair_distance_summary(greedy_match(points([0.0, 0.1, 1.0, 1.05]), 2, L2))
        assert s.minimum == pytest.approx(0.05)
        assert s.maximum == pytest.approx(0.1)
        assert s.count == 2 and s.zero_count == 0

    def test_continuous_features_all_mismatched(self):
        rng = np.random.default_rng(1)
        d = points(rng.random((40, 3)))
        m = greedy_match(d, 20, L2)
        s = pair_distance_summary(m)
        assert s.maximum > 0 and s.zero_count == 0
        assert m.mismatch_count == 20

    def test_empty_matching_rejected(self):
        with pytest.raises(ValueError):
            pair_distance_summary(Matching.from_pairs([], []))


def test_max_distance_shrinks_as_n_grows():
    # matching quality improves with density: the median (over seeds) of the
    # greedy max pair distance at L = n/8 should not increase as n doubles
    for dim in (1, 2):
        medians = []
        for n in (64, 128, 256, 512):
            worst = []
            for s in range(21):
                rng = np.random.default_rng(derive_seed(1000 + dim, n, s))
                d = points(rng.random((n, dim)))
                worst.append(max(greedy_match(d, n // 8, L2).distances))
            medians.append(float(np.median(worst)))
        assert all(a >= b for a, b in zip(medians, medians[1:])), (dim, medians)
