"""Hashing-based density scoring for outlier detection and drifting streams.

Three estimators share one idea: bucket occupancy under an ensemble of
random hashes is a linear-time stand-in for local density.

* :class:`FireScorer` -- thresholded-bit sketch ensemble, scores how rare
  each row of a dataset is.
* :class:`Fire1Scorer` -- quantized random projections with explicit bin
  width; also resolves local outliers and scores unseen rows.
* :class:`EnhashClassifier` -- streaming classifier with decayed bucket
  statistics that adapts to concept drift.

Everything is deterministic under a seed and linear in the number of
samples at fixed ensemble shape.
"""

from .data import (
    CLASS_LABEL,
    DataError,
    DataMatrix,
    FirekitError,
    LabelVector,
    ModelFormatError,
    OUTLIER_BINARY,
    RngSpec,
)
from .enhash import EnhashClassifier, EvalReport, prequential_evaluate
from .fire import FireScorer, FireScoreReport, f1_binary, iqr_threshold
from .fire1 import Fire1Scorer, Fire1ScoreReport
from .io import load_csv, load_model, save_model, write_scores
from .metrics import (
    MethodMeasureTable,
    RankedScores,
    adjusted_average_precision,
    adjusted_precision_at_n,
    average_precision,
    evaluate_ranking,
    friedman_ranks,
    precision_at_n,
    rank_scores,
    roc_auc,
)
from .outlierness import OScoreHistogram, dataset_o_scores, o_score, oscore_histogram
from .streams import (
    ClusterSpec,
    DriftStreamSpec,
    PlantedOutlierSpec,
    default_abrupt_spec,
    default_planted_spec,
    gen_abrupt,
    gen_incremental,
    gen_planted,
    gen_stream,
    gen_virtual,
)

__version__ = "0.1.0"

__all__ = [
    "CLASS_LABEL",
    "ClusterSpec",
    "DataError",
    "DataMatrix",
    "DriftStreamSpec",
    "EnhashClassifier",
    "EvalReport",
    "Fire1ScoreReport",
    "Fire1Scorer",
    "FireScoreReport",
    "FireScorer",
    "FirekitError",
    "LabelVector",
    "MethodMeasureTable",
    "ModelFormatError",
    "OUTLIER_BINARY",
    "OScoreHistogram",
    "PlantedOutlierSpec",
    "RankedScores",
    "RngSpec",
    "adjusted_average_precision",
    "adjusted_precision_at_n",
    "average_precision",
    "dataset_o_scores",
    "default_abrupt_spec",
    "default_planted_spec",
    "evaluate_ranking",
    "f1_binary",
    "friedman_ranks",
    "gen_abrupt",
    "gen_incremental",
    "gen_planted",
    "gen_stream",
    "gen_virtual",
    "iqr_threshold",
    "load_csv",
    "load_model",
    "o_score",
    "oscore_histogram",
    "precision_at_n",
    "prequential_evaluate",
    "rank_scores",
    "roc_auc",
    "save_model",
    "write_scores",
]
