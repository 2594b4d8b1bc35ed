"""Greedy nearest-pair matching and an exhaustive minimax-matching oracle.

The greedy matcher repeatedly removes the globally closest remaining pair of
records. The oracle enumerates every disjoint pairing of a small instance and
returns the best achievable maximum pair distance, which upper-bounds the
greedy matcher's worst pair at twice the matching size (a guarantee the test
suite checks on random instances).
"""

from dataclasses import dataclass

import numpy as np

from .core import Dataset, DistanceMetric, ExpertTestError

__all__ = [
    "TooManyPairs",
    "InstanceTooLarge",
    "Matching",
    "PairDistanceSummary",
    "greedy_match",
    "brute_force_optimal_matching",
    "pair_distance_summary",
]

# exhaustive enumeration cap for the oracle
_MAX_ORACLE_N = 14

_SCAN_CHUNK = 1 << 16


class TooManyPairs(ExpertTestError):
    """Requested more disjoint pairs than floor(n/2)."""


class InstanceTooLarge(ExpertTestError):
    """The exhaustive matching oracle only handles very small instances."""


@dataclass(frozen=True)
class Matching:
    """L disjoint index pairs in greedy selection order.

    ``pairs[t]`` is the pair removed at step ``t``; ``distances[t]`` is its
    distance, so ``distances`` is nondecreasing. ``mismatch_count`` is the
    number of pairs whose members are not identical in feature space
    (distance > 0), the source of the test's approximation error.
    """

    pairs: tuple[tuple[int, int], ...]
    distances: tuple[float, ...]
    mismatch_count: int

    def __post_init__(self) -> None:
        if len(self.pairs) != len(self.distances):
            raise ValueError("pairs and distances must align")
        seen: set[int] = set()
        for i, j in self.pairs:
            if i == j or i in seen or j in seen:
                raise ValueError("matching pairs must be disjoint")
            seen.update((i, j))
        if any(b < a for a, b in zip(self.distances, self.distances[1:])):
            raise ValueError("greedy distances must be nondecreasing")
        if any(t < 0 for t in self.distances):
            raise ValueError("distances must be nonnegative")
        if self.mismatch_count != sum(1 for t in self.distances if t > 0):
            raise ValueError("mismatch_count inconsistent with distances")

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_pairs(cls, pairs, distances) -> "Matching":
        distances = tuple(float(t) for t in distances)
        return cls(
            tuple((int(i), int(j)) for i, j in pairs),
            distances,
            sum(1 for t in distances if t > 0),
        )

    def prefix(self, L: int) -> "Matching":
        """First ``L`` selected pairs; identical to running the greedy matcher at L."""
        if not 0 <= L <= len(self.pairs):
            raise ValueError(f"prefix length {L} out of range")
        return Matching.from_pairs(self.pairs[:L], self.distances[:L])

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Pair members as two int arrays (first member, second member)."""
        if not self.pairs:
            empty = np.empty(0, dtype=np.intp)
            return empty, empty.copy()
        arr = np.asarray(self.pairs, dtype=np.intp)
        return arr[:, 0], arr[:, 1]

    @property
    def max_distance(self) -> float:
        return max(self.distances) if self.distances else 0.0


@dataclass(frozen=True)
class PairDistanceSummary:
    """Order statistics of a matching's pair distances."""

    count: int
    zero_count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def greedy_match(d: Dataset, L: int, metric: DistanceMetric) -> Matching:
    """Select ``L`` disjoint pairs by repeatedly removing the closest remaining pair.

    Ties are broken deterministically by the lexicographically smallest
    ``(i, j)`` index pair. With odd ``n`` the leftover record is simply never
    selected.

    Raises
    ------
    TooManyPairs
        If ``L`` exceeds floor(n/2).
    """
    n = d.n
    if L < 1:
        raise ValueError("L must be at least 1")
    if L > n // 2:
        raise TooManyPairs(f"L={L} exceeds floor(n/2)={n // 2}")

    dist = metric.pairwise_condensed(d.x)
    ii, jj = np.triu_indices(n, k=1)
    # process pairs in (distance, i, j) order; the first pair with both
    # endpoints unused is exactly the greedy argmin at that step
    order = np.lexsort((jj, ii, dist))

    free = np.ones(n, dtype=bool)
    pairs: list[tuple[int, int]] = []
    dists: list[float] = []
    for start in range(0, order.size, _SCAN_CHUNK):
        block = order[start : start + _SCAN_CHUNK]
        bi = ii[block].tolist()
        bj = jj[block].tolist()
        bd = dist[block].tolist()
        for i, j, t in zip(bi, bj, bd):
            if free[i] and free[j]:
                free[i] = False
                free[j] = False
                pairs.append((i, j))
                dists.append(t)
                if len(pairs) == L:
                    return Matching.from_pairs(pairs, dists)
    raise AssertionError("unreachable: L <= floor(n/2) guarantees enough pairs")


def brute_force_optimal_matching(d: Dataset, L: int, metric: DistanceMetric) -> float:
    """Minimax pair distance over *all* matchings of size ``L`` (exhaustive).

    Returns the smallest achievable maximum pair distance among every way of
    choosing ``L`` disjoint index pairs. Exponential in ``n``; refuses
    instances with more than 14 records.

    Raises
    ------
    InstanceTooLarge
        If ``n`` exceeds the enumeration cap.
    TooManyPairs
        If ``L`` exceeds floor(n/2).
    """
    n = d.n
    if n > _MAX_ORACLE_N:
        raise InstanceTooLarge(f"n={n} exceeds the enumeration cap of {_MAX_ORACLE_N}")
    if L < 1:
        raise ValueError("L must be at least 1")
    if L > n // 2:
        raise TooManyPairs(f"L={L} exceeds floor(n/2)={n // 2}")

    dm = metric.pairwise_matrix(d.x)
    full = (1 << n) - 1
    memo: dict[tuple[int, int], float] = {}

    def best_max(mask: int, t: int) -> float:
        # minimal achievable max distance using t disjoint pairs among the
        # indices still set in mask
        if t == 0:
            return 0.0
        key = (mask, t)
        if key in memo:
            return memo[key]
        i = (mask & -mask).bit_length() - 1  # lowest free index
        rest = mask & ~(1 << i)
        best = np.inf
        if rest.bit_count() >= 2 * t:
            best = best_max(rest, t)  # leave i unmatched
        sub = rest
        while sub:
            j = (sub & -sub).bit_length() - 1
            sub &= sub - 1
            cand = max(dm[i, j], best_max(rest & ~(1 << j), t - 1))
            if cand < best:
                best = cand
        memo[key] = best
        return best

    return float(best_max(full, L))


def pair_distance_summary(m: Matching) -> PairDistanceSummary:
    """Distribution summary (min, quartiles, max, count at zero) of pair distances."""
    if not m.distances:
        raise ValueError("cannot summarize an empty matching")
    t = np.asarray(m.distances)
    q1, med, q3 = np.quantile(t, [0.25, 0.5, 0.75])
    return PairDistanceSummary(
        count=len(m),
        zero_count=int((t == 0).sum()),
        minimum=float(t.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=float(t.max()),
    )
