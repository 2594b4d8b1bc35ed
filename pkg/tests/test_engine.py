import numpy as np
import pytest

from experttest.core import (
    Dataset,
    DistanceMetric,
    IncompatibleLoss,
    LossSpec,
    SeededRng,
    dataset_loss,
    derive_seed,
)
from experttest.engine import (
    EnumerationTooLarge,
    NonBinaryData,
    SwapCounts,
    TestConfig,
    classify_swaps,
    exact_binary_p,
    expert_test,
    resample_once,
    swap_stream,
    tau_statistic,
    expert_test_with_matching,
    tie_break_stream,
)
from experttest.matching import Matching, TooManyPairs, greedy_match
from experttest.synthgen import ExpertiseConfig, gen_expertise_pairs, gen_validity_cube

L2 = DistanceMetric.euclidean()


def paired_binary_dataset(increase, decrease, neutral=0):
    """Duplicated-x pairs with the requested swap-classification counts."""
    y, p = [], []
    for _ in range(increase):
        y += [0.0, 1.0]
        p += [0.0, 1.0]  # both correct, outcomes differ
    for _ in range(decrease):
        y += [0.0, 1.0]
        p += [1.0, 0.0]  # both wrong, outcomes differ
    for _ in range(neutral):
        y += [0.0, 0.0]
        p += [0.0, 1.0]  # same outcome: a swap moves nothing that matters
    n = len(y)
    x = np.repeat(np.arange(n // 2, dtype=float), 2)
    return Dataset(x, y, p)


class TestResampleOnce:
    def test_empty_matching_returns_identical_dataset(self):
        d = paired_binary_dataset(2, 1)
        out = resample_once(d, Matching.from_pairs([], []), SeededRng(3))
        assert out == d

    def test_forced_swap_exchanges_predictions_only(self):
        d = Dataset([[0.0], [0.0]], [1.0, 2.0], [10.0, 20.0])
        m = greedy_match(d, 1, L2)
        seed = next(s for s in range(50) if SeededRng(s).generator().random(1)[0] < 0.5)
        out = resample_once(d, m, SeededRng(seed))
        assert out.y_hat.tolist() == [20.0, 10.0]
        assert out.y.tolist() == [1.0, 2.0]
        assert np.array_equal(out.x, d.x)

    def test_no_swap_when_draw_high(self):
        d = Dataset([[0.0], [0.0]], [1.0, 2.0], [10.0, 20.0])
        m = greedy_match(d, 1, L2)
        seed = next(s for s in range(50) if SeededRng(s).generator().random(1)[0] >= 0.5)
        assert resample_once(d, m, SeededRng(seed)) == d

    def test_reproducible_across_runs(self):
        d = paired_binary_dataset(5, 5, 5)
        m = greedy_match(d, 15, L2)
        a = resample_once(d, m, SeededRng(123, 9))
        b = resample_once(d, m, SeededRng(123, 9))
        assert a == b

    def test_out_of_range_indices_rejected(self):
        d = paired_binary_dataset(2, 0)
        with pytest.raises(ValueError):
            resample_once(d, Matching.from_pairs([(0, 99)], [0.0]), SeededRng(0))


class TestTauStatistic:
    def test_all_resampled_smaller_gives_one(self):
        assert tau_statistic(5.0, [1.0, 2.0, 3.0, 4.0], SeededRng(0)) == 1.0

    def test_all_resampled_greater_gives_zero(self):
        assert tau_statistic(1.0, [2.0, 3.0, 4.0], SeededRng(0)) == 0.0

    def test_all_ties_behave_like_fair_coins(self):
        K = 20
        taus = [tau_statistic(1.0, [1.0] * K, SeededRng(s)) for s in range(500)]
        assert 0.45 <= np.mean(taus) <= 0.55
        assert all(round(t * K) in range(K + 1) for t in taus)

    def test_empty_losses_rejected(self):
        with pytest.raises(ValueError):
            tau_statistic(1.0, [], SeededRng(0))


class TestClassifySwaps:
    def test_both_correct_pair_increases(self):
        d = paired_binary_dataset(1, 0)
        assert classify_swaps(d, greedy_match(d, 1, L2)) == SwapCounts(1, 0, 0)

    def test_both_wrong_pair_decreases(self):
        d = paired_binary_dataset(0, 1)
        assert classify_swaps(d, greedy_match(d, 1, L2)) == SwapCounts(0, 1, 0)

    def test_same_outcome_pair_is_neutral(self):
        # y1 = y2 means a swap cannot change any mistake count
        d = Dataset([[0.0], [0.0]], [1.0, 1.0], [0.0, 1.0])
        assert classify_swaps(d, greedy_match(d, 1, L2)) == SwapCounts(0, 0, 1)

    def test_counts_sum_to_L(self):
        d = paired_binary_dataset(3, 2, 4)
        counts = classify_swaps(d, greedy_match(d, 9, L2))
        assert counts == SwapCounts(3, 2, 4)

    def test_non_binary_rejected(self):
        d = Dataset([[0.0], [0.0]], [0.5, 1.0], [0.0, 1.0])
        with pytest.raises(NonBinaryData):
            classify_swaps(d, greedy_match(d, 1, L2))


class TestExactBinaryP:
    def test_no_loss_changing_pairs_is_half(self):
        assert exact_binary_p(0, 0) == 0.5

    def test_single_increase_pair(self):
        # two equally likely resamples: a tie (contributes 1/4) or worse (0)
        assert exact_binary_p(1, 0) == 0.25

    def test_matches_exhaustive_mask_enumeration(self):
        def oracle(a, b):
            total = 0.0
            for mask in range(2 ** (a + b)):
                x = (mask & ((1 << a) - 1)).bit_count()
                y = (mask >> a).bit_count()
                if x < y:
                    total += 1.0
                elif x == y:
                    total += 0.5
            return total / 2 ** (a + b)

        for a in range(7):
            for b in range(7):
                assert exact_binary_p(a, b) == oracle(a, b), (a, b)

    def test_symmetry(self):
        # swapping roles mirrors the comparison around 1/2
        for a, b in [(3, 5), (0, 4), (6, 1)]:
            assert exact_binary_p(a, b) + exact_binary_p(b, a) == pytest.approx(1.0)

    def test_enumeration_cap(self):
        with pytest.raises(EnumerationTooLarge):
            exact_binary_p(31, 30)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            exact_binary_p(-1, 0)


class TestConfigValidation:
    def test_bounds(self):
        loss, metric = LossSpec.zero_one(), L2
        with pytest.raises(ValueError):
            TestConfig(L=0, K=1, alpha=0.05, loss=loss, metric=metric, master_seed=0)
        with pytest.raises(ValueError):
            TestConfig(L=1, K=0, alpha=0.05, loss=loss, metric=metric, master_seed=0)
        with pytest.raises(ValueError):
            TestConfig(L=1, K=1, alpha=1.0, loss=loss, metric=metric, master_seed=0)


class TestExpertTest:
    def cfg(self, **kw):
        base = dict(L=10, K=50, alpha=0.05, loss=LossSpec.zero_one(), metric=L2, master_seed=7)
        base.update(kw)
        return TestConfig(**base)

    def test_deterministic(self):
        d = gen_expertise_pairs(ExpertiseConfig(n=100, delta=0.2, seed=5))
        assert expert_test(d, self.cfg()) == expert_test(d, self.cfg())

    def test_tau_granularity_and_effective_p(self):
        d = gen_expertise_pairs(ExpertiseConfig(n=100, delta=0.2, seed=5))
        r = expert_test(d, self.cfg(K=37))
        assert r.tau * 37 == pytest.approx(round(r.tau * 37), abs=1e-9)
        assert 0 <= round(r.tau * 37) <= 37
        assert r.effective_p == r.tau + 1.0 / 38
        assert r.rejected == (r.tau <= 0.05)

    def test_perfect_expert_rejects(self):
        # delta = 1/2: observed loss is minimal and any executed swap on any
        # pair strictly increases it
        d = gen_expertise_pairs(ExpertiseConfig(n=200, delta=0.5, seed=3))
        r = expert_test(d, self.cfg(L=50, K=1000))
        assert r.tau <= 0.001
        assert r.rejected
        assert r.observed_loss == 0.0
        assert r.binary_swap_counts == SwapCounts(50, 0, 0)

    def test_propagates_too_many_pairs(self):
        d = gen_expertise_pairs(ExpertiseConfig(n=20, delta=0.1, seed=1))
        with pytest.raises(TooManyPairs):
            expert_test(d, self.cfg(L=11))

    def test_propagates_incompatible_loss(self):
        d = gen_validity_cube(40, 2)
        with pytest.raises(IncompatibleLoss):
            expert_test(d, self.cfg())

    def test_swap_counts_present_for_binary_data_any_loss(self):
        d = paired_binary_dataset(4, 2, 4)
        for loss in (LossSpec.zero_one(), LossSpec.squared_error(), LossSpec.weighted_binary(1, 5)):
            r = expert_test(d, self.cfg(loss=loss))
            assert r.binary_swap_counts == SwapCounts(4, 2, 4)

    def test_swap_counts_absent_for_continuous_data(self):
        d = gen_validity_cube(60, 4)
        r = expert_test(d, self.cfg(loss=LossSpec.squared_error()))
        assert r.binary_swap_counts is None
        assert r.mismatch_count == 10

    def test_matches_literal_composition(self):
        # the vectorized engine must be bit-identical to running
        # resample_once -> dataset_loss -> tau_statistic by hand
        d = gen_expertise_pairs(ExpertiseConfig(n=80, delta=0.1, seed=12))
        dcont = gen_validity_cube(80, 12)
        cases = [
            (d, LossSpec.zero_one()),
            (d, LossSpec.weighted_binary(0.3, 1.7)),
            (d, LossSpec.squared_error()),
            (dcont, LossSpec.squared_error()),
        ]
        for data, loss in cases:
            cfg = self.cfg(L=20, K=151, loss=loss, master_seed=99)
            m = greedy_match(data, cfg.L, cfg.metric)
            observed = dataset_loss(data, loss)
            resampled = [
                dataset_loss(resample_once(data, m, swap_stream(cfg.master_seed, k)), loss)
                for k in range(cfg.K)
            ]
            literal = tau_statistic(observed, resampled, tie_break_stream(cfg.master_seed))
            assert expert_test(data, cfg).tau == literal, loss.describe()

    def test_with_matching_requires_matching_length(self):
        d = gen_expertise_pairs(ExpertiseConfig(n=40, delta=0.1, seed=0))
        m = greedy_match(d, 5, L2)
        with pytest.raises(ValueError):
            expert_test_with_matching(d, m, self.cfg(L=6))

    def test_prefix_of_larger_matching_is_bit_identical(self):
        # resample streams draw one uniform per pair in order, so a smaller L
        # consumes a prefix of each stream and sweeping L over one matching
        # reproduces standalone runs exactly
        d = gen_validity_cube(120, 31)
        full = greedy_match(d, 40, L2)
        for L in (5, 17, 40):
            cfg = self.cfg(L=L, K=29, loss=LossSpec.squared_error(), master_seed=61)
            assert expert_test_with_matching(d, full.prefix(L), cfg) == expert_test(d, cfg)

    def test_loss_class_robustness(self):
        # identical seeds: the tau trajectory only depends on the swap
        # classification, so any strictly positive cost pair agrees exactly
        d = gen_expertise_pairs(ExpertiseConfig(n=300, delta=0.15, seed=9))
        losses = [
            LossSpec.zero_one(),
            LossSpec.weighted_binary(1, 5),
            LossSpec.weighted_binary(5, 1),
            LossSpec.weighted_binary(1, 1),
        ]
        results = [expert_test(d, self.cfg(L=75, K=200, loss=lo, master_seed=777)) for lo in losses]
        assert len({r.tau for r in results}) == 1
        assert len({r.binary_swap_counts for r in results}) == 1

    def test_mean_tau_matches_analytic_value(self):
        for trial, (a, b) in enumerate([(3, 1), (0, 2), (4, 4)]):
            d = paired_binary_dataset(a, b, neutral=2)
            L = d.n // 2
            expected = exact_binary_p(a, b)
            taus = [
                expert_test(
                    d, self.cfg(L=L, K=40, master_seed=derive_seed(55, trial, s))
                ).tau
                for s in range(300)
            ]
            taus = np.asarray(taus)
            se = taus.std(ddof=1) / np.sqrt(taus.size)
            assert abs(taus.mean() - expected) <= 3 * se + 1e-12, (a, b)
