"""Local-versus-global outlierness scoring.

For a labeled outlier, compare its nearest inlier distances with its
farthest ones: the ratio is near 1 when the point is far from everything
(global outlier) and small when the point hugs one cluster (local
outlier).  Averaging the phi smallest and phi largest distances keeps a
single noisy inlier from dominating either end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataError, LabelVector, OUTLIER_BINARY, as_matrix

DEFAULT_PHI = 10


@dataclass(frozen=True)
class OScoreHistogram:
    """20-bin histogram of a dataset's per-outlier o-scores.

    ``bin_edges`` has 21 ascending entries and doubles as a fixed-length
    feature vector describing the dataset's outlier composition.
    """

    bin_edges: np.ndarray
    counts: np.ndarray


def o_score(outlier_point, inliers, phi: int = DEFAULT_PHI) -> float:
    """Ratio of mean nearest to mean farthest inlier distance, in (0, 1].

    The averaging count is clamped to max(1, min(phi, |I| // 2)) so the
    near and far windows never overlap on small inlier sets.
    """
    if phi < 1:
        raise DataError(f"phi must be >= 1, got {phi}")
    pts = np.atleast_2d(np.asarray(inliers, dtype=np.float64))
    if pts.shape[0] < 1:
        raise DataError("o-score needs at least one inlier")
    point = np.asarray(outlier_point, dtype=np.float64)
    dists = np.sqrt(((pts - point) ** 2).sum(axis=1))
    if dists.max() == 0.0:
        raise DataError("outlier coincides with every inlier; o-score undefined")
    k = max(1, min(int(phi), len(dists) // 2))
    part = np.partition(dists, [k - 1, len(dists) - k])
    near = part[:k].mean()
    far = part[len(dists) - k:].mean()
    return float(near / far)


def dataset_o_scores(X, labels: LabelVector, phi: int = DEFAULT_PHI) -> np.ndarray:
    """o-score of every labeled outlier, in row order of the outliers."""
    m = as_matrix(X)
    if labels.kind != OUTLIER_BINARY:
        raise DataError("o-scores need outlier-binary labels")
    mask = labels.values
    if len(mask) != m.n_rows:
        raise DataError(f"labels cover {len(mask)} rows but matrix has {m.n_rows}")
    if not mask.any():
        raise DataError("dataset has no labeled outliers")
    if mask.all():
        raise DataError("dataset has no inliers")
    inliers = m.values[~mask]
    return np.array([o_score(row, inliers, phi) for row in m.values[mask]])


def oscore_histogram(X, labels: LabelVector, phi: int = DEFAULT_PHI) -> OScoreHistogram:
    """Histogram the outliers' o-scores into 20 equal-width bins.

    The edges span [min, max] of the observed o-scores; when all scores
    coincide the span is widened by an epsilon-scale pad so the edges stay
    strictly ascending and every score lands in bin 0.
    """
    scores = dataset_o_scores(X, labels, phi)
    lo, hi = float(scores.min()), float(scores.max())
    if lo == hi:
        hi = lo + max(abs(lo), 1.0) * np.finfo(np.float64).eps * 32
    edges = np.linspace(lo, hi, 21)
    counts, _ = np.histogram(scores, bins=edges)
    return OScoreHistogram(edges, counts)
