"""Streaming concept-drift classifier over an ensemble of projection hashes.

Each of L estimators quantizes incoming samples into buckets with a
full-dimensional Gaussian projection hash.  A bucket keeps, per class:

* a decayed, normalized weight (its share of the bucket's recent mass),
* the timestamp of the class's last update,
* the raw sample count and coordinate sum (for exact class means).

Prediction accumulates, over estimators, ``ln(1 + v_c)`` where ``v_c``
decays with the time since the bucket was last touched and is divided by
the sample's distance to the class mean inside the bucket.  Updates decay
the target class weight by the time since that class was last seen in
the bucket, add 1, and renormalize the bucket.  The decay is what lets
the model forget a superseded concept: stale buckets lose their vote and
one fresh sample is enough to flip a bucket's majority.

Samples must be processed in arrival order; within one sample the L
estimators are independent.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .data import DataError, as_rng_spec
from .hashing import sample_gaussian_projection

DEFAULT_N_ESTIMATORS = 10
DEFAULT_BIN_WIDTH = 0.1
DEFAULT_DECAY_RATE = 0.015

# Floor for the sample-to-class-mean distance, so a sample sitting
# exactly on a mean cannot divide by zero.
MIN_DISTANCE = 1e-12


class _EstimatorState:
    """One hash function plus its per-bucket per-class statistics."""

    __slots__ = ("weights", "bias", "counts", "tstamp", "s_counts", "s_acc")

    def __init__(self, weights, bias):
        self.weights = weights
        self.bias = bias
        self.counts: dict = {}    # bucket -> {class: normalized decayed weight}
        self.tstamp: dict = {}    # bucket -> {class: last update time}
        self.s_counts: dict = {}  # bucket -> {class: raw sample count}
        self.s_acc: dict = {}     # bucket -> {class: coordinate sum}


class EnhashClassifier(BaseEstimator):
    """Online classifier that predicts, then learns, one sample at a time.

    Parameters
    ----------
    n_estimators : int, default 10
        Ensemble size L.
    bin_width : float, default 0.1
        Bucket granularity of every projection hash.
    decay_rate : float, default 0.015
        Forgetting rate: weights age by 2**(-decay_rate * dt).  Zero
        disables forgetting entirely (every decay multiplier is 1).
    distance_weighting : bool, default True
        Divide class weights by the distance to the class mean in the
        bucket.  When disabled, prediction ties are broken by a seeded
        random draw instead of first-seen class order.
    seed : int or RngSpec, default 0

    The time counter ``t_`` advances once per stream sample, driven by
    :meth:`step` or :meth:`partial_fit`; :meth:`update_one` alone never
    advances it.
    """

    def __init__(self, n_estimators=DEFAULT_N_ESTIMATORS, bin_width=DEFAULT_BIN_WIDTH,
                 decay_rate=DEFAULT_DECAY_RATE, distance_weighting=True, seed=0):
        self.n_estimators = n_estimators
        self.bin_width = bin_width
        self.decay_rate = decay_rate
        self.distance_weighting = distance_weighting
        self.seed = seed

    # -- lifecycle -------------------------------------------------------

    def _ensure_initialized(self, d: int):
        if hasattr(self, "estimators_"):
            if d != self.n_features_in_:
                raise DataError(
                    f"dimension mismatch: stream started with {self.n_features_in_} "
                    f"features, got {d}"
                )
            return
        if self.n_estimators < 1:
            raise DataError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if not self.bin_width > 0:
            raise DataError(f"bin_width must be positive, got {self.bin_width}")
        if self.decay_rate < 0:
            raise DataError(f"decay_rate must be >= 0, got {self.decay_rate}")
        rng = as_rng_spec(self.seed)
        self.estimators_ = []
        for l in range(int(self.n_estimators)):
            proj = sample_gaussian_projection(rng.estimator_generator(l), d, float(self.bin_width))
            self.estimators_.append(_EstimatorState(proj.weights, proj.bias))
        # Substream one past the last estimator, reserved for tie-breaking.
        self._tie_rng = rng.estimator_generator(int(self.n_estimators))
        self._proj_matrix = np.stack([e.weights for e in self.estimators_])
        self._proj_bias = np.array([e.bias for e in self.estimators_])
        self.n_features_in_ = d
        self.classes_: list = []
        self.t_ = 0

    def _as_row(self, x) -> np.ndarray:
        row = np.asarray(x, dtype=np.float64)
        if row.ndim != 1:
            raise DataError(f"expected a single sample vector, got shape {row.shape}")
        if not np.isfinite(row).all():
            raise DataError("sample contains non-finite values")
        self._ensure_initialized(len(row))
        return row

    def _buckets(self, row: np.ndarray) -> np.ndarray:
        quot = np.floor((self._proj_matrix @ row + self._proj_bias) / self.bin_width)
        return quot.astype(np.int64)

    # -- prediction ------------------------------------------------------

    def predict_weights(self, x):
        """Predicted class and the accumulated per-class vote weights.

        Returns ``(None, {})`` while no class has ever been seen.  Buckets
        the sample has never hit contribute nothing.
        """
        row = self._as_row(x)
        if not self.classes_:
            return None, {}
        lam = float(self.decay_rate)
        t = self.t_
        cweights = {c: 0.0 for c in self.classes_}
        for est, b in zip(self.estimators_, self._buckets(row).tolist()):
            bucket = est.counts.get(b)
            if not bucket:
                continue
            dt1 = t - max(est.tstamp[b].values())
            decay = 2.0 ** (-lam * dt1)
            if self.distance_weighting:
                acc = est.s_acc[b]
                cnt = est.s_counts[b]
                for c, w in bucket.items():
                    mean = acc[c] / cnt[c]
                    dist = max(math.dist(row, mean), MIN_DISTANCE)
                    cweights[c] += math.log1p(decay * w / dist)
            else:
                for c, w in bucket.items():
                    cweights[c] += math.log1p(decay * w)
        return self._argmax(cweights), cweights

    def _argmax(self, cweights: dict):
        best = max(cweights.values())
        tied = [c for c in self.classes_ if cweights[c] == best]
        if len(tied) == 1 or self.distance_weighting:
            # First-seen class order resolves residual ties deterministically.
            return tied[0]
        return tied[int(self._tie_rng.integers(len(tied)))]

    def predict_one(self, x):
        """Predicted class for one sample; the model is not modified."""
        return self.predict_weights(x)[0]

    def predict(self, X) -> np.ndarray:
        """Predictions for each row of X from the current state (no updates)."""
        rows = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty(rows.shape[0], dtype=object)
        for i, row in enumerate(rows):
            out[i] = self.predict_one(row)
        return out

    # -- learning --------------------------------------------------------

    def update_one(self, x, y):
        """Fold one labeled sample into every estimator's bucket statistics."""
        row = self._as_row(x)
        if y not in set(self.classes_):
            self.classes_.append(y)
        lam = float(self.decay_rate)
        t = self.t_
        for est, b in zip(self.estimators_, self._buckets(row).tolist()):
            bucket = est.counts.setdefault(b, {})
            ts = est.tstamp.setdefault(b, {})
            dt2 = t - ts.get(y, t)
            bucket[y] = 1.0 + 2.0 ** (-lam * dt2) * bucket.get(y, 0.0)
            total = sum(bucket.values())
            for c in bucket:
                bucket[c] /= total
            ts[y] = t
            s_cnt = est.s_counts.setdefault(b, {})
            s_cnt[y] = s_cnt.get(y, 0) + 1
            s_acc = est.s_acc.setdefault(b, {})
            if y in s_acc:
                s_acc[y] = s_acc[y] + row
            else:
                s_acc[y] = row.copy()

    def step(self, x, y):
        """Predict from the pre-update state, then learn, then advance time."""
        pred = self.predict_one(x)
        self.update_one(x, y)
        self.t_ += 1
        return pred

    def partial_fit(self, X, y, classes=None):
        """Learn rows in arrival order without recording predictions."""
        rows = np.atleast_2d(np.asarray(X, dtype=np.float64))
        labels = list(y)
        if rows.shape[0] != len(labels):
            raise DataError(f"X has {rows.shape[0]} rows but y has {len(labels)} labels")
        for row, lab in zip(rows, labels):
            self.update_one(row, lab)
            self.t_ += 1
        return self


@dataclass
class EvalReport:
    """Outcome of one prequential pass over a stream."""

    error: float
    kappa_m: float | None
    kappa_t: float | None
    wall_time_s: float
    n_samples: int
    n_classes: int
    window: int | None = None
    windowed_errors: list = field(default_factory=list)


def prequential_evaluate(model: EnhashClassifier, stream, window: int | None = None) -> EvalReport:
    """Interleaved test-then-train pass: each sample is predicted, scored,
    then used for training.

    ``error`` is the misclassified fraction.  Kappa-M rescales accuracy
    against always predicting the stream's overall majority class;
    Kappa-Temporal against predicting the previous sample's label (the
    first sample counts as a persistence miss).  Either is None when its
    baseline is already perfect.  With ``window`` set, the report carries
    the trailing windowed error after every step.
    """
    if window is not None and window < 1:
        raise DataError(f"window must be >= 1, got {window}")
    n = 0
    misses = 0
    persistence_hits = 0
    prev_label = None
    class_counts: dict = {}
    recent = deque()
    recent_misses = 0
    windowed: list = []
    start = time.perf_counter()
    for x, y in stream:
        pred = model.step(x, y)
        miss = pred != y
        n += 1
        misses += int(miss)
        if prev_label is not None and y == prev_label:
            persistence_hits += 1
        prev_label = y
        class_counts[y] = class_counts.get(y, 0) + 1
        if window is not None:
            recent.append(miss)
            recent_misses += int(miss)
            if len(recent) > window:
                recent_misses -= int(recent.popleft())
            windowed.append(recent_misses / len(recent))
    wall = time.perf_counter() - start
    if n == 0:
        raise DataError("stream yielded no samples")
    p0 = 1.0 - misses / n
    p_maj = max(class_counts.values()) / n
    p_per = persistence_hits / n
    kappa_m = None if p_maj == 1.0 else (p0 - p_maj) / (1.0 - p_maj)
    kappa_t = None if p_per == 1.0 else (p0 - p_per) / (1.0 - p_per)
    return EvalReport(
        error=misses / n,
        kappa_m=kappa_m,
        kappa_t=kappa_t,
        wall_time_s=wall,
        n_samples=n,
        n_classes=len(class_counts),
        window=window,
        windowed_errors=windowed,
    )
