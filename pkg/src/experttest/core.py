"""Shared domain types: datasets, loss functions, distance metrics, seeded RNG streams.

Everything here is an immutable value object; instances are safe to share
across concurrent workers. Randomness throughout the package flows through
:func:`stream` / :class:`SeededRng`, so any two runs with the same master
seed produce bit-identical results.
"""

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ExpertTestError",
    "IncompatibleLoss",
    "Observation",
    "Dataset",
    "LossSpec",
    "DistanceMetric",
    "SeededRng",
    "stream",
    "derive_seed",
    "dataset_loss",
]


class ExpertTestError(Exception):
    """Base class for every error raised by this package."""


class IncompatibleLoss(ExpertTestError):
    """A binary loss variant was applied to non-binary outcomes or predictions."""


# ---------------------------------------------------------------------------
# Seeded RNG streams
# ---------------------------------------------------------------------------

_U64 = (1 << 64) - 1


def stream(master_seed: int, *path: int) -> np.random.Generator:
    """Return the generator for sub-stream ``path`` of ``master_seed``.

    Equal ``(master_seed, path)`` always yield identical draw sequences;
    distinct paths yield statistically independent streams. This is the
    single entry point for randomness in the package, which makes results
    reproducible under any execution order of independent work items.
    """
    seq = np.random.SeedSequence(master_seed & _U64, spawn_key=path)
    return np.random.default_rng(seq)


def derive_seed(master_seed: int, *path: int) -> int:
    """Collapse a sub-stream identity into a fresh 64-bit master seed."""
    seq = np.random.SeedSequence(master_seed & _U64, spawn_key=path)
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SeededRng:
    """Identity of one reproducible random stream.

    ``stream_id`` selects one of 2**64 independent streams derived from the
    master seed; the package reserves ids >= 2**32 for internal resampling
    streams, so user-facing code should stick to small ids.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        return stream(self.master_seed, self.stream_id)


# ---------------------------------------------------------------------------
# Observations and datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Observation:
    """One record: feature vector ``x``, outcome ``y``, expert prediction ``y_hat``."""

    x: tuple[float, ...]
    y: float
    y_hat: float


class Dataset:
    """An ordered collection of records, stored column-wise.

    Parameters
    ----------
    x : array_like, shape (n, d)
        Feature vectors. A 1-d array is treated as ``d = 1``.
    y : array_like, shape (n,)
        Observed outcomes.
    y_hat : array_like, shape (n,)
        Expert predictions.

    All values must be finite; missing data is rejected at construction,
    never imputed. Arrays are copied and frozen, so a dataset never changes
    after it is built.
    """

    def __init__(self, x, y, y_hat) -> None:
        x = np.array(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise ValueError("x must be a 2-d array of shape (n, d)")
        y = np.array(y, dtype=np.float64)
        y_hat = np.array(y_hat, dtype=np.float64)
        n = x.shape[0]
        if y.shape != (n,) or y_hat.shape != (n,):
            raise ValueError("x, y and y_hat must agree on the number of records")
        if n < 2:
            raise ValueError("a dataset needs at least 2 records")
        if x.shape[1] < 1:
            raise ValueError("feature dimension must be at least 1")
        if not (np.isfinite(x).all() and np.isfinite(y).all() and np.isfinite(y_hat).all()):
            raise ValueError("all values must be finite; missing data is not supported")
        for arr in (x, y, y_hat):
            arr.flags.writeable = False
        self._x, self._y, self._y_hat = x, y, y_hat

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def y_hat(self) -> np.ndarray:
        return self._y_hat

    @property
    def n(self) -> int:
        return self._x.shape[0]

    @property
    def d(self) -> int:
        return self._x.shape[1]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self._x, other._x)
            and np.array_equal(self._y, other._y)
            and np.array_equal(self._y_hat, other._y_hat)
        )

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, d={self.d})"

    @property
    def observations(self) -> Iterator[Observation]:
        for i in range(self.n):
            yield Observation(tuple(self._x[i]), float(self._y[i]), float(self._y_hat[i]))

    @classmethod
    def from_observations(cls, records: Sequence[Observation]) -> "Dataset":
        return cls(
            [r.x for r in records],
            [r.y for r in records],
            [r.y_hat for r in records],
        )

    def with_y_hat(self, y_hat: np.ndarray) -> "Dataset":
        """Copy of this dataset with predictions replaced (x and y never move)."""
        return Dataset(self._x, self._y, y_hat)

    def is_binary(self) -> bool:
        """True when every outcome and prediction is exactly 0 or 1."""
        return bool(
            np.isin(self._y, (0.0, 1.0)).all() and np.isin(self._y_hat, (0.0, 1.0)).all()
        )


# ---------------------------------------------------------------------------
# Loss functions
# ---------------------------------------------------------------------------

_ZERO_ONE = "zero_one"
_SQUARED = "squared_error"
_WEIGHTED = "weighted_binary"


@dataclass(frozen=True)
class LossSpec:
    """Which dataset loss to use when comparing observed and resampled data.

    Construct via :meth:`zero_one`, :meth:`squared_error` or
    :meth:`weighted_binary`. Every variant induces a per-record loss whose
    mean over records is the dataset loss, so the dataset loss is invariant
    under permutation of record indices by construction.
    """

    variant: str
    fp_cost: float = 1.0
    fn_cost: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in (_ZERO_ONE, _SQUARED, _WEIGHTED):
            raise ValueError(f"unknown loss variant: {self.variant!r}")
        if self.fp_cost < 0 or self.fn_cost < 0:
            raise ValueError("false-positive / false-negative costs must be nonnegative")

    @classmethod
    def zero_one(cls) -> "LossSpec":
        """Fraction of records with ``y != y_hat``."""
        return cls(_ZERO_ONE)

    @classmethod
    def squared_error(cls) -> "LossSpec":
        """Mean of ``(y - y_hat)**2``."""
        return cls(_SQUARED)

    @classmethod
    def weighted_binary(cls, fp_cost: float, fn_cost: float) -> "LossSpec":
        """(fp_cost * #false-positives + fn_cost * #false-negatives) / n."""
        return cls(_WEIGHTED, fp_cost=fp_cost, fn_cost=fn_cost)

    @property
    def requires_binary(self) -> bool:
        return self.variant in (_ZERO_ONE, _WEIGHTED)

    def check_compatible(self, d: Dataset) -> None:
        if self.requires_binary and not d.is_binary():
            raise IncompatibleLoss(
                f"{self.variant} loss requires y and y_hat in {{0, 1}} for every record"
            )

    def per_record(self, y: np.ndarray, y_hat: np.ndarray) -> np.ndarray:
        """Per-record loss values; the dataset loss is their mean."""
        if self.variant == _ZERO_ONE:
            return (y != y_hat).astype(np.float64)
        if self.variant == _SQUARED:
            diff = y - y_hat
            return diff * diff
        fp = (y == 0.0) & (y_hat == 1.0)
        fn = (y == 1.0) & (y_hat == 0.0)
        return self.fp_cost * fp + self.fn_cost * fn

    def describe(self) -> str:
        if self.variant == _WEIGHTED:
            return f"weighted_binary(fp={self.fp_cost:g}, fn={self.fn_cost:g})"
        return self.variant


def dataset_loss(d: Dataset, loss: LossSpec) -> float:
    """Mean per-record loss of the expert predictions on ``d``.

    Bit-for-bit invariant under permutation of record order: binary variants
    reduce to integer mistake counts, and squared error sums its per-record
    terms in a canonical (sorted) order.

    Raises
    ------
    IncompatibleLoss
        If a binary loss variant is applied to non-binary data.
    """
    loss.check_compatible(d)
    y, y_hat = d.y, d.y_hat
    if loss.variant == _ZERO_ONE:
        return int((y != y_hat).sum()) / d.n
    if loss.variant == _WEIGHTED:
        n_fp = int(((y == 0.0) & (y_hat == 1.0)).sum())
        n_fn = int(((y == 1.0) & (y_hat == 0.0)).sum())
        return (loss.fp_cost * n_fp + loss.fn_cost * n_fn) / d.n
    per = loss.per_record(y, y_hat)
    return float(np.sort(per).sum() / d.n)


# ---------------------------------------------------------------------------
# Distance metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceMetric:
    """Distance over feature vectors used to decide which records may be paired.

    ``euclidean`` is the plain l2 distance; ``weighted_euclidean`` scales each
    squared coordinate difference by a nonnegative weight (zero weights ablate
    features entirely).
    """

    variant: str
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.variant not in ("euclidean", "weighted_euclidean"):
            raise ValueError(f"unknown metric variant: {self.variant!r}")
        if self.variant == "weighted_euclidean":
            if self.weights is None or len(self.weights) == 0:
                raise ValueError("weighted_euclidean needs a weight vector")
            if any(w < 0 for w in self.weights):
                raise ValueError("metric weights must be nonnegative")

    @classmethod
    def euclidean(cls) -> "DistanceMetric":
        return cls("euclidean")

    @classmethod
    def weighted_euclidean(cls, weights: Sequence[float]) -> "DistanceMetric":
        return cls("weighted_euclidean", tuple(float(w) for w in weights))

    @property
    def is_euclidean(self) -> bool:
        return self.variant == "euclidean"

    def _check_dim(self, d: int) -> None:
        if self.weights is not None and len(self.weights) != d:
            raise ValueError(
                f"metric has {len(self.weights)} weights but data has {d} features"
            )

    def _scaled(self, x: np.ndarray) -> np.ndarray:
        # sqrt(sum(w * dx**2)) == plain euclidean on coordinates scaled by sqrt(w)
        if self.weights is None:
            return x
        return x * np.sqrt(np.asarray(self.weights))

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        self._check_dim(a.shape[-1])
        diff = self._scaled(a) - self._scaled(b)
        return float(np.sqrt((diff * diff).sum()))

    def pairwise_condensed(self, x: np.ndarray) -> np.ndarray:
        """Condensed distance vector over the rows of ``x`` (scipy pdist order)."""
        from scipy.spatial.distance import pdist

        self._check_dim(x.shape[1])
        return pdist(self._scaled(x), metric="euclidean")

    def pairwise_matrix(self, x: np.ndarray) -> np.ndarray:
        from scipy.spatial.distance import squareform

        return squareform(self.pairwise_condensed(x))

    def describe(self) -> str:
        if self.weights is not None:
            return "weighted_euclidean(" + ",".join(f"{w:g}" for w in self.weights) + ")"
        return self.variant
