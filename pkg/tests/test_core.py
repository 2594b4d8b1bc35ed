import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from experttest.core import (
    Dataset,
    DistanceMetric,
    IncompatibleLoss,
    LossSpec,
    Observation,
    SeededRng,
    dataset_loss,
    derive_seed,
    stream,
)


def binary_dataset(y, y_hat):
    n = len(y)
    return Dataset(np.zeros((n, 1)), y, y_hat)


class TestDatasetLoss:
    def test_zero_one_perfect_predictions(self):
        d = binary_dataset([0, 1, 0, 1], [0, 1, 0, 1])
        assert dataset_loss(d, LossSpec.zero_one()) == 0.0

    def test_zero_one_counts_mismatches(self):
        d = binary_dataset([0, 1, 0, 1], [1, 0, 0, 1])
        assert dataset_loss(d, LossSpec.zero_one()) == 0.5

    def test_squared_error(self):
        d = Dataset([[0.0], [0.0]], [1.0, 3.0], [2.0, 3.0])
        assert dataset_loss(d, LossSpec.squared_error()) == 0.5

    def test_weighted_binary(self):
        # one false positive (record 0) and one false negative (record 1)
        d = binary_dataset([0, 1, 0, 1], [1, 0, 0, 1])
        loss = LossSpec.weighted_binary(fp_cost=2.0, fn_cost=3.0)
        assert dataset_loss(d, loss) == (2.0 + 3.0) / 4

    def test_binary_loss_rejects_continuous_values(self):
        d = Dataset([[0.0], [0.0]], [0.5, 1.0], [0.0, 1.0])
        with pytest.raises(IncompatibleLoss):
            dataset_loss(d, LossSpec.zero_one())
        with pytest.raises(IncompatibleLoss):
            dataset_loss(d, LossSpec.weighted_binary(1, 1))
        assert dataset_loss(d, LossSpec.squared_error()) == pytest.approx(0.125)

    def test_negative_costs_rejected(self):
        with pytest.raises(ValueError):
            LossSpec.weighted_binary(-1.0, 1.0)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_permutation_invariance_exact(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 60))
        y = rng.normal(size=n)
        y_hat = rng.normal(size=n)
        yb = rng.integers(0, 2, n).astype(float)
        pb = rng.integers(0, 2, n).astype(float)
        x = rng.normal(size=(n, 2))
        perm = rng.permutation(n)
        for loss, (yy, pp) in [
            (LossSpec.squared_error(), (y, y_hat)),
            (LossSpec.zero_one(), (yb, pb)),
            (LossSpec.weighted_binary(0.3, 1.7), (yb, pb)),
        ]:
            a = dataset_loss(Dataset(x, yy, pp), loss)
            b = dataset_loss(Dataset(x[perm], yy[perm], pp[perm]), loss)
            assert a == b


class TestDataset:
    def test_rejects_missing_values(self):
        with pytest.raises(ValueError):
            Dataset([[0.0], [np.nan]], [0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            Dataset([[0.0], [1.0]], [0.0, np.inf], [0.0, 1.0])

    def test_requires_two_records(self):
        with pytest.raises(ValueError):
            Dataset([[0.0]], [0.0], [0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            Dataset([[0.0], [1.0]], [0.0, 1.0, 2.0], [0.0, 1.0])

    def test_one_dimensional_features_promoted(self):
        d = Dataset([0.0, 1.0, 2.0], [0, 0, 0], [0, 0, 0])
        assert d.d == 1 and d.n == 3

    def test_arrays_frozen(self):
        d = Dataset([[0.0], [1.0]], [0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            d.y_hat[0] = 5.0

    def test_observation_round_trip(self):
        d = Dataset([[0.0, 2.0], [1.0, 3.0]], [0.5, 1.5], [0.25, 1.25])
        obs = list(d.observations)
        assert obs[1] == Observation((1.0, 3.0), 1.5, 1.25)
        assert Dataset.from_observations(obs) == d

    def test_with_y_hat_leaves_original_untouched(self):
        d = Dataset([[0.0], [1.0]], [0.0, 1.0], [0.0, 1.0])
        d2 = d.with_y_hat(np.array([1.0, 0.0]))
        assert d.y_hat.tolist() == [0.0, 1.0]
        assert d2.y_hat.tolist() == [1.0, 0.0]
        assert np.array_equal(d.x, d2.x)

    def test_is_binary(self):
        assert binary_dataset([0, 1], [1, 0]).is_binary()
        assert not Dataset([[0.0], [0.0]], [0.0, 0.5], [0.0, 1.0]).is_binary()


class TestDistanceMetric:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_metric_axioms(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 6))
        a = rng.normal(size=d)
        b = rng.normal(size=d)
        w = rng.random(d)
        for metric in (DistanceMetric.euclidean(), DistanceMetric.weighted_euclidean(w)):
            assert metric.distance(a, a) == 0.0
            assert metric.distance(a, b) == metric.distance(b, a)
            assert metric.distance(a, b) >= 0.0

    def test_zero_weight_ablate_feature(self):
        metric = DistanceMetric.weighted_euclidean([1.0, 0.0])
        a = np.array([1.0, 100.0])
        b = np.array([4.0, -50.0])
        assert metric.distance(a, b) == pytest.approx(3.0)

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            DistanceMetric.weighted_euclidean([1.0, -0.5])

    def test_weight_dimension_checked(self):
        metric = DistanceMetric.weighted_euclidean([1.0, 1.0])
        with pytest.raises(ValueError):
            metric.distance(np.zeros(3), np.ones(3))

    def test_pairwise_matches_distance(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(6, 3))
        metric = DistanceMetric.weighted_euclidean([0.5, 2.0, 1.0])
        condensed = metric.pairwise_condensed(x)
        k = 0
        for i in range(6):
            for j in range(i + 1, 6):
                assert condensed[k] == pytest.approx(metric.distance(x[i], x[j]))
                k += 1


class TestSeededRng:
    def test_equal_seed_equal_draws(self):
        a = SeededRng(1234, 7).generator().random(16)
        b = SeededRng(1234, 7).generator().random(16)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = SeededRng(1234, 0).generator().random(16)
        b = SeededRng(1234, 1).generator().random(16)
        assert not np.array_equal(a, b)

    def test_negative_master_seed_supported(self):
        a = SeededRng(-9876, 0).generator().random(4)
        b = SeededRng(-9876, 0).generator().random(4)
        assert np.array_equal(a, b)

    def test_negative_stream_rejected(self):
        with pytest.raises(ValueError):
            SeededRng(1, -1)

    def test_stream_paths_are_independent_coordinates(self):
        assert not np.array_equal(stream(5, 0).random(8), stream(5, 0, 0).random(8))

    def test_derive_seed_deterministic(self):
        assert derive_seed(99, 1, 2) == derive_seed(99, 1, 2)
        assert derive_seed(99, 1, 2) != derive_seed(99, 2, 1)
