"""Projection-hash density scorer with explicit bin-width control.

Same scoring rule as :mod:`firekit.fire`, but rows are bucketed by a
quantized random projection instead of a bit sketch.  The bin width sets
the spatial granularity directly, so the scorer resolves local outliers
even in low dimension, where a bit sketch can only produce 2**M buckets.

Unlike the sketch scorer, a fitted instance keeps the bucket occupancy
tables of its training data.  That allows scoring rows that were never
seen during fitting: an unseen row's neighborhood is smoothed to

    (1 + occupants of its bucket) / (1 + N)

so a row falling into an empty bucket gets the minimum neighborhood
1 / (N + 1) and therefore the maximum score 2 * L * ln(N + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import DataError, as_matrix, as_rng_spec
from .hashing import ProjectionEstimator, sample_projection_estimator, projection_index_batch

DEFAULT_BIN_WIDTH = 0.1


@dataclass(frozen=True)
class Fire1ScoreReport:
    """Scores plus per-estimator neighborhoods, as in the sketch scorer."""

    scores: np.ndarray
    neighborhoods: np.ndarray


class Fire1Scorer(BaseEstimator):
    """Rare-row scorer built on an ensemble of quantized random projections.

    Parameters
    ----------
    n_estimators : int, default 100
        Ensemble size L.
    subspace_size : int or None, default None
        Features sampled (with replacement) per estimator.  None picks
        ceil(sqrt(d)) at fit time.
    bin_width : float, default 0.1
        Quantization width of the projected line.  Smaller values spread
        rows over more buckets; tune per dataset.
    seed : int or RngSpec, default 0

    Attributes
    ----------
    estimators_ : list of ProjectionEstimator
    bucket_tables_ : list of dict, bucket id -> training occupant count
    trained_n_ : int
    n_features_in_ : int
    """

    def __init__(self, n_estimators=100, subspace_size=None,
                 bin_width=DEFAULT_BIN_WIDTH, seed=0):
        self.n_estimators = n_estimators
        self.subspace_size = subspace_size
        self.bin_width = bin_width
        self.seed = seed

    def fit(self, X, y=None):
        """Sample projections from the data's ranges and bucket every row."""
        m = as_matrix(X)
        if self.n_estimators < 1:
            raise DataError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if not self.bin_width > 0:
            raise DataError(f"bin_width must be positive, got {self.bin_width}")
        if self.subspace_size is None:
            subspace = max(1, math.ceil(math.sqrt(m.n_cols)))
        else:
            subspace = int(self.subspace_size)
            if subspace < 1:
                raise DataError(f"subspace_size must be >= 1, got {self.subspace_size}")
        rng = as_rng_spec(self.seed)
        self.estimators_ = []
        self.bucket_tables_ = []
        for l in range(int(self.n_estimators)):
            est = sample_projection_estimator(rng.estimator_generator(l), m.feature_mins,
                                              m.feature_maxs, subspace, float(self.bin_width))
            idx = projection_index_batch(est, m.values)
            buckets, counts = np.unique(idx, return_counts=True)
            self.estimators_.append(est)
            self.bucket_tables_.append(dict(zip(buckets.tolist(), counts.tolist())))
        self.rng_ = rng
        self.subspace_size_ = subspace
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

    def _bucket_counts(self, m) -> np.ndarray:
        """Training occupant count of each row's bucket, per estimator (N x L)."""
        counts = np.empty((m.n_rows, len(self.estimators_)), dtype=np.int64)
        for l, est in enumerate(self.estimators_):
            idx = projection_index_batch(est, m.values)
            table = self.bucket_tables_[l]
            counts[:, l] = [table.get(b, 0) for b in idx.tolist()]
        return counts

    def score_report(self, X) -> Fire1ScoreReport:
        """Score rows of the training support against the stored tables.

        Every row must land in a non-empty training bucket (true for the
        training data itself); rows outside the support belong in
        :meth:`score_unseen`.
        """
        m = as_matrix(X)
        self._check_fitted(m)
        counts = self._bucket_counts(m)
        if (counts == 0).any():
            raise DataError(
                "a row fell outside every training bucket; "
                "use score_unseen() for data the scorer was not fitted on"
            )
        neighborhoods = counts / self.trained_n_
        scores = -2.0 * np.log(neighborhoods).sum(axis=1)
        return Fire1ScoreReport(scores, neighborhoods)

    def score_samples(self, X) -> np.ndarray:
        """Rareness scores only (see :meth:`score_report`)."""
        return self.score_report(X).scores

    def score_unseen(self, X) -> np.ndarray:
        """Score rows never shown to fit(), without touching the tables.

        Neighborhoods are smoothed to (1 + occupants) / (1 + N); the
        stored tables are read, never mutated, so scoring unseen data is
        pure and repeatable.
        """
        m = as_matrix(X)
        self._check_fitted(m)
        counts = self._bucket_counts(m)
        n_est = len(self.estimators_)
        # -2 sum ln((1 + k) / (1 + N)) = 2 L ln(1 + N) - 2 sum ln(1 + k);
        # the split keeps the empty-bucket score exactly 2 L ln(N + 1).
        return 2.0 * n_est * np.log(self.trained_n_ + 1.0) - 2.0 * np.log1p(counts).sum(axis=1)
