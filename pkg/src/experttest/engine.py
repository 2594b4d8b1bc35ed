"""The hypothesis test: pair-swap resampling, the tau statistic, and rejection.

The test statistic is the fraction of resampled datasets whose loss falls
below the observed loss, with exact ties broken by independent fair coins. A
small tau means the expert's observed loss is unusually good relative to the
swap distribution, which is evidence that predictions carry information the
features do not.

Loss comparisons are computed from per-pair swap deltas rather than by
rebuilding each resampled dataset: for binary losses the delta of every
executed swap is plus or minus one (fp_cost + fn_cost) unit, so comparisons
and ties reduce to exact integer counts; for squared error the deltas are
summed in floating point. Either way the result is bit-identical to scoring
each resampled dataset, and the K resamples draw from indexed streams so they
can be evaluated in any order (or concurrently) without changing the result.
"""

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .core import (
    Dataset,
    DistanceMetric,
    ExpertTestError,
    LossSpec,
    SeededRng,
    dataset_loss,
)
from .matching import Matching, greedy_match

__all__ = [
    "NonBinaryData",
    "EnumerationTooLarge",
    "TestConfig",
    "TestResult",
    "SwapCounts",
    "resample_once",
    "tau_statistic",
    "classify_swaps",
    "expert_test",
    "expert_test_with_matching",
    "exact_binary_p",
    "swap_stream",
    "tie_break_stream",
]


class NonBinaryData(ExpertTestError):
    """Swap classification is only defined for binary outcomes and predictions."""


class EnumerationTooLarge(ExpertTestError):
    """Exact binary p-value computation refuses too many loss-changing pairs."""


# Stream ids reserved on the master seed: one stream per resample index plus a
# dedicated tie-break stream, so resamples are reproducible under any
# execution order.
_TIE_STREAM_ID = 1
_SWAP_STREAM_BASE = 1 << 32

_EXACT_P_CAP = 60


def swap_stream(master_seed: int, resample_index: int) -> SeededRng:
    """Stream that decides which pairs the given resample swaps."""
    return SeededRng(master_seed, _SWAP_STREAM_BASE + resample_index)


def tie_break_stream(master_seed: int) -> SeededRng:
    """Stream consumed by the tau statistic's randomized tie-breaking."""
    return SeededRng(master_seed, _TIE_STREAM_ID)


@dataclass(frozen=True)
class TestConfig:
    """Parameters of one test run."""

    __test__ = False  # not a pytest class, despite the name

    L: int
    K: int
    alpha: float
    loss: LossSpec
    metric: DistanceMetric
    master_seed: int

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")


@dataclass(frozen=True)
class SwapCounts:
    """How many pairs' swaps would increase, decrease, or not change the loss."""

    increase: int
    decrease: int
    neutral: int


@dataclass(frozen=True)
class TestResult:
    """Outcome of one test run.

    ``tau`` is always a multiple of 1/K. ``effective_p`` is
    ``tau + 1/(K + 1)``, the tightest level at which the run rejects.
    ``binary_swap_counts`` is filled whenever every matched record is binary,
    regardless of the loss used.
    """

    __test__ = False  # not a pytest class, despite the name

    tau: float
    effective_p: float
    rejected: bool
    L: int
    K: int
    mismatch_count: int
    observed_loss: float
    binary_swap_counts: SwapCounts | None


def resample_once(d: Dataset, m: Matching, rng: SeededRng) -> Dataset:
    """One synthetic dataset: each pair's predictions are exchanged with probability 1/2.

    Draws one Bernoulli per pair from ``rng`` in pair order; ``x`` and ``y``
    values never move.
    """
    pi, pj = m.index_arrays()
    if pi.size and (pi.max() >= d.n or pj.max() >= d.n):
        raise ValueError("matching indices out of range for this dataset")
    swap = rng.generator().random(len(m)) < 0.5
    y_hat = d.y_hat.copy()
    a, b = pi[swap], pj[swap]
    y_hat[a], y_hat[b] = y_hat[b], y_hat[a]
    return d.with_y_hat(y_hat)


def tau_statistic(
    observed_loss: float, resampled_losses: Sequence[float], rng: SeededRng
) -> float:
    """Fraction of resampled losses below the observed loss, ties split by fair coins.

    Each comparison contributes 1 when the resampled loss is strictly
    smaller, 0 when strictly larger, and an independent fair Bernoulli draw
    (one per tied comparison, in comparison order) when exactly equal.
    """
    res = np.asarray(resampled_losses, dtype=np.float64)
    if res.size < 1:
        raise ValueError("need at least one resampled loss")
    less = res < observed_loss
    ties = res == observed_loss
    coins = rng.generator().random(int(ties.sum())) < 0.5
    return float((int(less.sum()) + int(coins.sum())) / res.size)


def classify_swaps(d: Dataset, m: Matching) -> SwapCounts:
    """Classify each pair by the effect of exchanging its two predictions.

    For binary data a swap changes the mistake count only when the pair's
    outcomes differ and its predictions differ: if both predictions are
    currently correct the swap creates a false positive and a false negative
    (increase); if both are currently wrong it removes one of each
    (decrease); every other configuration leaves any mistake-count-monotone
    loss unchanged (neutral).

    Raises
    ------
    NonBinaryData
        If any matched record has a non-binary outcome or prediction.
    """
    inc, dec = _swap_class_masks(d, m)
    n_inc = int(inc.sum())
    n_dec = int(dec.sum())
    return SwapCounts(n_inc, n_dec, len(m) - n_inc - n_dec)


def _swap_class_masks(d: Dataset, m: Matching) -> tuple[np.ndarray, np.ndarray]:
    pi, pj = m.index_arrays()
    y1, y2 = d.y[pi], d.y[pj]
    p1, p2 = d.y_hat[pi], d.y_hat[pj]
    for arr in (y1, y2, p1, p2):
        if not np.isin(arr, (0.0, 1.0)).all():
            raise NonBinaryData("matched records must have y and y_hat in {0, 1}")
    differ = y1 != y2
    inc = differ & (p1 == y1) & (p2 == y2)
    dec = differ & (p1 == y2) & (p2 == y1)
    return inc, dec


def _swap_masks(master_seed: int, K: int, L: int) -> np.ndarray:
    """K x L Bernoulli(1/2) swap decisions, one indexed stream per resample."""
    mask = np.empty((K, L), dtype=bool)
    for k in range(K):
        mask[k] = swap_stream(master_seed, k).generator().random(L) < 0.5
    return mask


def expert_test(d: Dataset, cfg: TestConfig) -> TestResult:
    """Run the full test: match, resample K times, compare losses, reject if tau <= alpha."""
    matching = greedy_match(d, cfg.L, cfg.metric)
    return expert_test_with_matching(d, matching, cfg)


def expert_test_with_matching(d: Dataset, matching: Matching, cfg: TestConfig) -> TestResult:
    """Like :func:`expert_test` but reusing a precomputed matching.

    ``matching`` must be the greedy matching of ``d`` at ``cfg.L`` (or a
    prefix of a longer greedy matching, which is the same thing); results are
    bit-identical to :func:`expert_test`.
    """
    if len(matching) != cfg.L:
        raise ValueError(f"matching has {len(matching)} pairs, config wants L={cfg.L}")
    cfg.loss.check_compatible(d)
    observed = dataset_loss(d, cfg.loss)

    mask = _swap_masks(cfg.master_seed, cfg.K, cfg.L)
    try:
        inc, dec = _swap_class_masks(d, matching)
    except NonBinaryData:
        counts = None
        less, ties = _compare_generic(d, matching, cfg.loss, mask)
    else:
        counts = SwapCounts(int(inc.sum()), int(dec.sum()), cfg.L - int(inc.sum()) - int(dec.sum()))
        if cfg.loss.requires_binary:
            less, ties = _compare_binary(inc, dec, cfg.loss, mask)
        else:
            less, ties = _compare_generic(d, matching, cfg.loss, mask)

    coins = tie_break_stream(cfg.master_seed).generator().random(int(ties.sum())) < 0.5
    tau = (int(less.sum()) + int(coins.sum())) / cfg.K
    return TestResult(
        tau=tau,
        effective_p=tau + 1.0 / (cfg.K + 1),
        rejected=tau <= cfg.alpha,
        L=cfg.L,
        K=cfg.K,
        mismatch_count=matching.mismatch_count,
        observed_loss=observed,
        binary_swap_counts=counts,
    )


def _compare_binary(
    inc: np.ndarray, dec: np.ndarray, loss: LossSpec, mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    # every executed increase swap adds one false positive and one false
    # negative; every executed decrease swap removes one of each, so the loss
    # difference is (fp_cost + fn_cost) * (executed increases - decreases)
    # and comparisons are exact integer arithmetic
    executed_inc = (mask & inc).sum(axis=1)
    executed_dec = (mask & dec).sum(axis=1)
    unit = loss.fp_cost + loss.fn_cost if loss.variant == "weighted_binary" else 2.0
    diff = executed_inc - executed_dec
    if unit == 0.0:
        return np.zeros(mask.shape[0], dtype=bool), np.ones(mask.shape[0], dtype=bool)
    return diff < 0, diff == 0


def _compare_generic(
    d: Dataset, m: Matching, loss: LossSpec, mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    pi, pj = m.index_arrays()
    unswapped = loss.per_record(d.y[pi], d.y_hat[pi]) + loss.per_record(d.y[pj], d.y_hat[pj])
    swapped = loss.per_record(d.y[pi], d.y_hat[pj]) + loss.per_record(d.y[pj], d.y_hat[pi])
    delta = swapped - unswapped
    diff = (mask * delta).sum(axis=1)
    return diff < 0, diff == 0


def exact_binary_p(increase: int, decrease: int) -> float:
    """Expected tau for binary data with the given count of loss-changing pairs.

    Under the swap distribution, each of the ``increase`` pairs independently
    worsens the resample with probability 1/2 and each of the ``decrease``
    pairs improves it, so the resampled-vs-observed comparison is decided by
    X ~ Binomial(increase, 1/2) against Y ~ Binomial(decrease, 1/2):
    P(resampled < observed) + P(tie)/2 = P(X < Y) + P(X = Y)/2.

    Computed by exact binomial convolution (integer arithmetic).

    Raises
    ------
    EnumerationTooLarge
        If increase + decrease exceeds 60.
    """
    if increase < 0 or decrease < 0:
        raise ValueError("swap counts must be nonnegative")
    if increase + decrease > _EXACT_P_CAP:
        raise EnumerationTooLarge(
            f"increase + decrease = {increase + decrease} exceeds {_EXACT_P_CAP}"
        )
    # doubled numerator so the half-weight of ties stays integral
    doubled = 0
    for x in range(increase + 1):
        wx = comb(increase, x)
        doubled += 2 * wx * sum(comb(decrease, y) for y in range(x + 1, decrease + 1))
        doubled += wx * comb(decrease, x)
    return doubled / 2 ** (increase + decrease + 1)
