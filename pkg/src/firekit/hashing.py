"""The two hash families behind every scorer in this package.

* :class:`SketchEstimator` -- thresholded-bit sketch: each of M sampled
  features contributes a bit (value >= threshold), the bit vector is
  combined with random integer weights and reduced modulo a prime table
  size.  Bucket ids live in ``[0, H)``.
* :class:`ProjectionEstimator` -- quantized random projection: a dot
  product with a random weight vector, shifted by a bias, divided by the
  bin width and floored.  Bucket ids are signed and unbounded.

Estimators are immutable; index computation is pure, so hashing is safe
to run in parallel over rows and estimators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataError

# Integer weights are drawn from [1, 2**31 - 1] so that the running
# (mod H) accumulation below never leaves int64 range for any M.
MAX_INT_WEIGHT = 2**31 - 1

# Largest bucket magnitude we allow before declaring the projection
# quantization out of range (int64 with float-rounding headroom).
_MAX_BUCKET = 2**62


def check_prime(h: int) -> int:
    """Validate that the sketch table size is a prime > 1 and return it."""
    h = int(h)
    if h <= 1:
        raise DataError(f"table size must be a prime > 1, got {h}")
    if h % 2 == 0:
        if h == 2:
            return h
        raise DataError(f"table size must be prime, got {h} (even)")
    f = 3
    while f * f <= h:
        if h % f == 0:
            raise DataError(f"table size must be prime, got {h} (divisible by {f})")
        f += 2
    return h


@dataclass(frozen=True)
class SketchEstimator:
    feature_indices: np.ndarray  # (M,) ints into [0, d)
    thresholds: np.ndarray       # (M,) floats within the sampled feature's range
    int_weights: np.ndarray      # (M,) ints in [1, MAX_INT_WEIGHT]
    modulus: int                 # prime table size H

    @property
    def n_bits(self) -> int:
        return len(self.feature_indices)


def sample_sketch_estimator(rng: np.random.Generator, feature_mins, feature_maxs,
                            n_bits: int, modulus: int) -> SketchEstimator:
    """Draw one sketch estimator: feature picks, thresholds, integer weights.

    Features are sampled with replacement; each threshold is uniform over
    the picked feature's own [min, max] range.
    """
    d = len(feature_mins)
    idx = rng.integers(0, d, size=n_bits)
    lo = np.asarray(feature_mins, dtype=np.float64)[idx]
    hi = np.asarray(feature_maxs, dtype=np.float64)[idx]
    thresholds = rng.uniform(lo, hi)
    weights = rng.integers(1, MAX_INT_WEIGHT + 1, size=n_bits, dtype=np.int64)
    return SketchEstimator(idx.astype(np.int64), thresholds, weights, int(modulus))


def sketch_index_batch(est: SketchEstimator, values: np.ndarray) -> np.ndarray:
    """Bucket ids in [0, H) for every row of ``values``.

    The accumulator is reduced mod H after every bit, which keeps it below
    H + max weight < 2**32 and is algebraically identical to reducing the
    full weighted sum once.
    """
    h = est.modulus
    acc = np.zeros(values.shape[0], dtype=np.int64)
    for j in range(est.n_bits):
        bit = values[:, est.feature_indices[j]] >= est.thresholds[j]
        acc = (acc + bit * est.int_weights[j]) % h
    return acc


def sketch_index(est: SketchEstimator, row) -> int:
    """Bucket id for a single row."""
    return int(sketch_index_batch(est, np.asarray(row, dtype=np.float64)[None, :])[0])


@dataclass(frozen=True)
class ProjectionEstimator:
    feature_indices: np.ndarray  # (M,) ints into [0, d); identity when M == d
    weights: np.ndarray          # (M,) floats
    bias: float
    bin_width: float

    def __post_init__(self):
        if not self.bin_width > 0:
            raise DataError(f"bin_width must be positive, got {self.bin_width}")
        if abs(self.bias) > self.bin_width:
            raise DataError(f"|bias| must not exceed bin_width, got bias={self.bias}")


def sample_projection_estimator(rng: np.random.Generator, feature_mins, feature_maxs,
                                subspace_size: int, bin_width: float) -> ProjectionEstimator:
    """Draw a subspace projection estimator with data-range uniform weights.

    Used by the batch density scorer: weight j is uniform over the picked
    feature's own [min, max] range, the bias uniform in [-bin_width, bin_width].
    """
    d = len(feature_mins)
    idx = rng.integers(0, d, size=subspace_size)
    lo = np.asarray(feature_mins, dtype=np.float64)[idx]
    hi = np.asarray(feature_maxs, dtype=np.float64)[idx]
    weights = rng.uniform(lo, hi)
    bias = float(rng.uniform(-bin_width, bin_width))
    return ProjectionEstimator(idx.astype(np.int64), weights, bias, float(bin_width))


def sample_gaussian_projection(rng: np.random.Generator, n_features: int,
                               bin_width: float) -> ProjectionEstimator:
    """Draw a full-dimensional projection with standard-normal weights.

    Used by the streaming classifier, where no training ranges exist.
    """
    weights = rng.standard_normal(n_features)
    bias = float(rng.uniform(-bin_width, bin_width))
    idx = np.arange(n_features, dtype=np.int64)
    return ProjectionEstimator(idx, weights, bias, float(bin_width))


def projection_index_batch(est: ProjectionEstimator, values: np.ndarray) -> np.ndarray:
    """Signed bucket ids for every row: floor((x . w + bias) / bin_width)."""
    proj = values[:, est.feature_indices] @ est.weights
    quot = np.floor((proj + est.bias) / est.bin_width)
    if np.abs(quot).max(initial=0.0) >= _MAX_BUCKET:
        raise DataError(
            "projected bucket id exceeds the signed 64-bit range; "
            "increase bin_width or rescale the data"
        )
    return quot.astype(np.int64)


def projection_index(est: ProjectionEstimator, row) -> int:
    """Signed bucket id for a single row."""
    return int(projection_index_batch(est, np.asarray(row, dtype=np.float64)[None, :])[0])
