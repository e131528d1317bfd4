"""Sketch-ensemble density scorer for rare-row detection.

The scorer hashes every row L times with independent thresholded-bit
sketches.  Rows sharing a bucket with few others sit in sparse regions;
the per-row score aggregates bucket occupancy across the ensemble:

    score_i = -2 * sum_l ln(occupancy_il / N)

Higher scores mean sparser neighborhoods, i.e. more rare.  Scores of a
dataset are computed against that dataset's own bucket occupancies, so a
single pass over the rows (plus a counting pass) suffices and the whole
computation is linear in N at fixed ensemble shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import DataError, as_matrix, as_rng_spec
from .hashing import SketchEstimator, check_prime, sample_sketch_estimator, sketch_index_batch

DEFAULT_N_ESTIMATORS = 100
DEFAULT_N_BITS = 50
DEFAULT_TABLE_SIZE = 1017881


@dataclass(frozen=True)
class FireScoreReport:
    """Scores plus the per-estimator evidence they were derived from.

    ``neighborhoods[i, l]`` is the fraction of rows sharing row i's bucket
    under estimator l (always in (0, 1]: a row occupies its own bucket).
    ``bucket_tables[l]`` maps bucket id -> occupant count for estimator l.
    """

    scores: np.ndarray
    neighborhoods: np.ndarray
    bucket_tables: list

    @property
    def n_rows(self) -> int:
        return len(self.scores)


class FireScorer(BaseEstimator):
    """Rare-row scorer built on an ensemble of thresholded-bit sketches.

    Parameters
    ----------
    n_estimators : int, default 100
        Ensemble size L.
    n_bits : int, default 50
        Sketch length M: features sampled (with replacement) per estimator.
    table_size : int, default 1017881
        Prime modulus H of the hash table.  Choose a prime comfortably
        larger than the number of rows to keep unrelated rows from
        colliding.
    seed : int or RngSpec, default 0
        Master seed; estimator l draws from substream (seed, l).

    Attributes
    ----------
    estimators_ : list of SketchEstimator
    n_features_in_ : int
    trained_n_ : int
    """

    def __init__(self, n_estimators=DEFAULT_N_ESTIMATORS, n_bits=DEFAULT_N_BITS,
                 table_size=DEFAULT_TABLE_SIZE, seed=0):
        self.n_estimators = n_estimators
        self.n_bits = n_bits
        self.table_size = table_size
        self.seed = seed

    def fit(self, X, y=None):
        """Sample the ensemble's sketch parameters from the data's ranges."""
        m = as_matrix(X)
        if self.n_estimators < 1:
            raise DataError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.n_bits < 1:
            raise DataError(f"n_bits must be >= 1, got {self.n_bits}")
        check_prime(self.table_size)
        rng = as_rng_spec(self.seed)
        self.estimators_ = [
            sample_sketch_estimator(rng.estimator_generator(l), m.feature_mins,
                                    m.feature_maxs, int(self.n_bits), int(self.table_size))
            for l in range(int(self.n_estimators))
        ]
        self.rng_ = rng
        self.n_features_in_ = m.n_cols
        self.trained_n_ = m.n_rows
        return self

    def _check_fitted(self, m):
        if not hasattr(self, "estimators_"):
            raise DataError("scorer is not fitted; call fit() first")
        if m.n_cols != self.n_features_in_:
            raise DataError(
                f"dimension mismatch: fitted on {self.n_features_in_} features, "
                f"got {m.n_cols}"
            )

    def score_report(self, X) -> FireScoreReport:
        """Score every row of X against X's own bucket occupancies."""
        m = as_matrix(X)
        self._check_fitted(m)
        n = m.n_rows
        n_est = len(self.estimators_)
        neighborhoods = np.empty((n, n_est))
        tables = []
        for l, est in enumerate(self.estimators_):
            idx = sketch_index_batch(est, m.values)
            buckets, inverse, counts = np.unique(idx, return_inverse=True, return_counts=True)
            neighborhoods[:, l] = counts[inverse] / n
            tables.append(dict(zip(buckets.tolist(), counts.tolist())))
        scores = -2.0 * np.log(neighborhoods).sum(axis=1)
        return FireScoreReport(scores, neighborhoods, tables)

    def score_samples(self, X) -> np.ndarray:
        """Rareness scores only (see :meth:`score_report`)."""
        return self.score_report(X).scores


def iqr_threshold(scores):
    """Dichotomize scores with the interquartile-range rule.

    Returns ``(threshold, flags)`` where ``threshold = q3 + 1.5 * (q3 - q1)``
    using linear-interpolation quantiles, and ``flags[i]`` is True iff
    ``scores[i] >= threshold``.  When all scores are equal the spread is
    zero and every row is flagged; callers should treat that case as
    "no separation" rather than "all rare".
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.size < 1:
        raise DataError("scores must form a non-empty 1-D vector")
    q1, q3 = np.quantile(s, [0.25, 0.75])
    threshold = q3 + 1.5 * (q3 - q1)
    return float(threshold), s >= threshold


def f1_binary(predicted_flags, true_flags) -> float:
    """F1 of the flagged (minor) class: 2PR / (P + R), 0 when P + R == 0."""
    pred = np.asarray(predicted_flags, dtype=bool)
    true = np.asarray(true_flags, dtype=bool)
    if pred.shape != true.shape:
        raise DataError(f"length mismatch: {pred.shape} vs {true.shape}")
    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    fn = int(np.sum(~pred & true))
    if tp == 0:
        return 0.0
    return 2.0 * tp / (2.0 * tp + fp + fn)
