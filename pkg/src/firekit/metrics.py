"""Ranking metrics for outlier scorings, plus cross-dataset method ranking.

All metrics treat higher scores as more outlying and depend only on the
induced ranking (and tie structure), never on score magnitudes.  Rank-based
metrics (precision at n, average precision) break score ties by original
row index via a stable sort, which keeps them deterministic; ROC-AUC
instead gives tied outlier/inlier pairs half credit, which is the one
tie rule with a standard definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .data import DataError, LabelVector, OUTLIER_BINARY


@dataclass(frozen=True)
class RankedScores:
    """A scoring joined with binary labels and 1-based descending ranks.

    ``ranks[i]`` is row i's position after a stable sort by decreasing
    score (ties keep original order), so ``ranks`` is a permutation of
    1..N.
    """

    scores: np.ndarray
    labels: np.ndarray  # bool, True = outlier
    ranks: np.ndarray   # int, 1-based

    @property
    def n(self) -> int:
        return len(self.scores)

    @property
    def n_outliers(self) -> int:
        return int(self.labels.sum())


def rank_scores(scores, labels) -> RankedScores:
    """Build a :class:`RankedScores` from raw scores and outlier labels."""
    s = np.asarray(scores, dtype=np.float64)
    if isinstance(labels, LabelVector):
        if labels.kind != OUTLIER_BINARY:
            raise DataError("ranking metrics need outlier-binary labels")
        lab = labels.values
    else:
        lab = np.asarray(labels).astype(bool)
    if s.ndim != 1 or s.size < 1:
        raise DataError("scores must form a non-empty 1-D vector")
    if lab.shape != s.shape:
        raise DataError(f"scores and labels disagree in length: {s.shape} vs {lab.shape}")
    if not np.isfinite(s).all():
        raise DataError("scores must be finite")
    order = np.argsort(-s, kind="stable")
    ranks = np.empty(len(s), dtype=np.int64)
    ranks[order] = np.arange(1, len(s) + 1)
    return RankedScores(s, lab, ranks)


def _check_outliers(ranked: RankedScores):
    if ranked.n_outliers == 0:
        raise DataError("metric undefined without at least one outlier")


def precision_at_n(ranked: RankedScores, n: int | None = None) -> float:
    """Fraction of the top-n rows that are true outliers (n defaults to |O|)."""
    _check_outliers(ranked)
    if n is None:
        n = ranked.n_outliers
    n = int(n)
    if not 1 <= n <= ranked.n:
        raise DataError(f"n must be in [1, {ranked.n}], got {n}")
    return float(np.sum(ranked.labels & (ranked.ranks <= n)) / n)


def adjusted_precision_at_n(ranked: RankedScores, n: int | None = None) -> float:
    """Precision at n rescaled so chance level maps to 0 and perfect to 1."""
    base = ranked.n_outliers / ranked.n
    if base == 1.0:
        raise DataError("adjustment undefined when every row is an outlier")
    return (precision_at_n(ranked, n) - base) / (1.0 - base)


def average_precision(ranked: RankedScores) -> float:
    """Mean over outliers o of precision at rank(o)."""
    _check_outliers(ranked)
    out_ranks = np.sort(ranked.ranks[ranked.labels])
    hits = np.arange(1, len(out_ranks) + 1)
    return float(np.mean(hits / out_ranks))


def adjusted_average_precision(ranked: RankedScores) -> float:
    """Average precision rescaled so chance level maps to 0 and perfect to 1."""
    base = ranked.n_outliers / ranked.n
    if base == 1.0:
        raise DataError("adjustment undefined when every row is an outlier")
    return (average_precision(ranked) - base) / (1.0 - base)


def roc_auc(ranked: RankedScores) -> float:
    """Probability a random outlier outscores a random inlier, ties half.

    Computed in O(N log N) from average-rank sums, which matches the
    pairwise definition exactly (including tie credit).
    """
    n_out = ranked.n_outliers
    n_in = ranked.n - n_out
    if n_out == 0 or n_in == 0:
        raise DataError("ROC-AUC needs at least one outlier and one inlier")
    ascending = rankdata(ranked.scores, method="average")
    rank_sum = float(ascending[ranked.labels].sum())
    return (rank_sum - n_out * (n_out + 1) / 2.0) / (n_out * n_in)


def evaluate_ranking(scores, labels, n: int | None = None) -> dict:
    """All five ranking metrics for one scoring, as a plain dict."""
    ranked = rank_scores(scores, labels)
    return {
        "n": ranked.n,
        "n_outliers": ranked.n_outliers,
        "top_n": int(n) if n is not None else ranked.n_outliers,
        "precision_at_n": precision_at_n(ranked, n),
        "adjusted_precision_at_n": adjusted_precision_at_n(ranked, n),
        "average_precision": average_precision(ranked),
        "adjusted_average_precision": adjusted_average_precision(ranked),
        "roc_auc": roc_auc(ranked),
    }


@dataclass(frozen=True)
class MethodMeasureTable:
    """One evaluation measure for several methods across several datasets.

    ``values`` is methods x datasets; NaN marks a method that produced no
    value on a dataset (for instance, one that could not scale to it).
    """

    values: np.ndarray
    methods: tuple
    datasets: tuple
    higher_is_better: bool = True


def friedman_ranks(values, higher_is_better: bool = True) -> np.ndarray:
    """Mean per-method rank across datasets, best method ranked 1.

    Within each dataset column, methods with values are ranked 1..Phi
    (ties averaged); missing entries shrink Phi for that column and do
    not count toward the method's mean.
    """
    table = values.values if isinstance(values, MethodMeasureTable) else np.asarray(values, dtype=np.float64)
    if isinstance(values, MethodMeasureTable):
        higher_is_better = values.higher_is_better
    if table.ndim != 2 or table.size == 0:
        raise DataError("method/measure table must be a non-empty 2-D matrix")
    n_methods, n_datasets = table.shape
    rank_sums = np.zeros(n_methods)
    rank_counts = np.zeros(n_methods, dtype=np.int64)
    for j in range(n_datasets):
        col = table[:, j]
        present = ~np.isnan(col)
        if not present.any():
            raise DataError(f"dataset column {j} has no values for any method")
        vals = col[present]
        ranks = rankdata(-vals if higher_is_better else vals, method="average")
        rank_sums[present] += ranks
        rank_counts[present] += 1
    with np.errstate(invalid="ignore"):
        mean = rank_sums / rank_counts
    mean[rank_counts == 0] = np.nan
    return mean
