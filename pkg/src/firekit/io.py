"""File formats: CSV matrices and scores, versioned JSON model files.

Numbers are written with Python's shortest round-trip representation, so
a written matrix or model reloads to bit-identical values.  Model files
carry a format tag, a format version, and a checksum over the canonical
payload; loading verifies all three.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .data import (
    CLASS_LABEL,
    DataError,
    DataMatrix,
    LabelVector,
    ModelFormatError,
    OUTLIER_BINARY,
    RngSpec,
)
from .fire import FireScorer
from .fire1 import Fire1Scorer
from .hashing import ProjectionEstimator, SketchEstimator

MODEL_FORMAT = "firekit-model"
MODEL_FORMAT_VERSION = 1


# -- CSV ------------------------------------------------------------------

def load_csv(path, label_column: str | None = None, label_kind: str = OUTLIER_BINARY):
    """Read a header-first CSV into a matrix and optional labels.

    Every non-label cell must parse as a finite real.  With
    ``label_column`` given, that column is excluded from the features and
    parsed as 0/1 outlier flags or as categorical class labels depending
    on ``label_kind``.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty, expected a header row") from None
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None:
            if label_column not in header:
                raise DataError(f"{path}: no column named {label_column!r} in header {header}")
            label_idx = header.index(label_column)
        rows = []
        raw_labels = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DataError(
                    f"{path}: line {lineno} has {len(record)} cells, header has {len(header)}"
                )
            vals = []
            for j, cell in enumerate(record):
                if j == label_idx:
                    raw_labels.append(cell.strip())
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}, column {header[j]!r}: "
                        f"cell {cell!r} is not numeric"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(
                        f"{path}: line {lineno}, column {header[j]!r}: "
                        f"cell {cell!r} is not finite"
                    )
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows after the header")
    matrix = DataMatrix.from_values(np.array(rows, dtype=np.float64))
    if label_idx is None:
        return matrix, None
    if label_kind == OUTLIER_BINARY:
        flags = []
        for i, cell in enumerate(raw_labels):
            if cell not in ("0", "1"):
                try:
                    num = float(cell)
                except ValueError:
                    num = None
                if num not in (0.0, 1.0):
                    raise DataError(
                        f"{path}: outlier label on data row {i + 1} must be 0 or 1, "
                        f"got {cell!r}"
                    )
                cell = "1" if num == 1.0 else "0"
            flags.append(cell == "1")
        labels = LabelVector.outlier_binary(np.array(flags))
    elif label_kind == CLASS_LABEL:
        labels = LabelVector.class_labels(raw_labels)
    else:
        raise DataError(f"unknown label kind {label_kind!r}")
    return matrix, labels


def _fmt(value: float) -> str:
    return repr(float(value))


def write_scores(path, scores, flags=None):
    """Write ``row_index,score[,rare]`` rows, preserving row order."""
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.size < 1:
        raise DataError("scores must form a non-empty 1-D vector")
    if not np.isfinite(s).all():
        raise DataError("scores must be finite")
    if flags is not None:
        flags = np.asarray(flags, dtype=bool)
        if flags.shape != s.shape:
            raise DataError("flags must match scores in length")
    with _open_out(path) as fh:
        header = "row_index,score,rare" if flags is not None else "row_index,score"
        fh.write(header + "\n")
        for i, v in enumerate(s):
            line = f"{i},{_fmt(v)}"
            if flags is not None:
                line += f",{int(flags[i])}"
            fh.write(line + "\n")


def write_matrix_csv(path, values, feature_names=None, extra_columns=()):
    """Write a feature matrix plus optional trailing label columns."""
    arr = np.asarray(values, dtype=np.float64)
    n, d = arr.shape
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(d)]
    names = list(feature_names) + [name for name, _ in extra_columns]
    cols = [col for _, col in extra_columns]
    with _open_out(path) as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            cells = [_fmt(v) for v in arr[i]]
            cells += [str(col[i]) for col in cols]
            fh.write(",".join(cells) + "\n")


class _open_out:
    """Open a path for writing; ``-`` means stdout (left open on exit)."""

    def __init__(self, path):
        self.path = path
        self.fh = None

    def __enter__(self):
        if self.path == "-":
            import sys
            self.fh = sys.stdout
        else:
            self.fh = open(self.path, "w", encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None and self.path != "-":
            self.fh.close()
        return False


# -- model serialization ---------------------------------------------------

def _rng_payload(rng: RngSpec) -> dict:
    return {"master_seed": int(rng.master_seed), "stream_id": int(rng.stream_id)}


def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(path, model):
    """Serialize a fitted scorer with all sampled parameters and tables."""
    if isinstance(model, FireScorer):
        kind = "fire"
        payload = {
            "n_features": model.n_features_in_,
            "trained_n": model.trained_n_,
            "n_estimators": len(model.estimators_),
            "n_bits": int(model.n_bits),
            "table_size": int(model.table_size),
            "rng": _rng_payload(model.rng_),
            "estimators": [
                {
                    "feature_indices": est.feature_indices.tolist(),
                    "thresholds": est.thresholds.tolist(),
                    "int_weights": est.int_weights.tolist(),
                }
                for est in model.estimators_
            ],
        }
    elif isinstance(model, Fire1Scorer):
        kind = "fire1"
        payload = {
            "n_features": model.n_features_in_,
            "trained_n": model.trained_n_,
            "n_estimators": len(model.estimators_),
            "subspace_size": int(model.subspace_size_),
            "bin_width": float(model.bin_width),
            "rng": _rng_payload(model.rng_),
            "estimators": [
                {
                    "feature_indices": est.feature_indices.tolist(),
                    "weights": est.weights.tolist(),
                    "bias": est.bias,
                }
                for est in model.estimators_
            ],
            "bucket_tables": [
                {"buckets": list(t.keys()), "counts": list(t.values())}
                for t in model.bucket_tables_
            ],
        }
    else:
        raise DataError(f"cannot serialize object of type {type(model).__name__}")
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "kind": kind,
        "checksum": _payload_checksum(payload),
        "payload": payload,
    }
    with _open_out(path) as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path):
    """Read a model file back into a fitted scorer, verifying integrity."""
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"no such file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a readable model file ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format version {doc.get('format_version')!r} not supported "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    payload = doc.get("payload")
    checksum = doc.get("checksum")
    if payload is None or checksum is None:
        raise ModelFormatError(f"{path}: model file is truncated")
    if _payload_checksum(payload) != checksum:
        raise ModelFormatError(f"{path}: checksum mismatch, file is corrupt")
    try:
        kind = doc["kind"]
        if kind == "fire":
            return _load_fire(payload)
        if kind == "fire1":
            return _load_fire1(payload)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model payload ({exc})") from None
    raise ModelFormatError(f"{path}: unknown model kind {doc.get('kind')!r}")


def _load_fire(payload: dict) -> FireScorer:
    rng = RngSpec(payload["rng"]["master_seed"], payload["rng"]["stream_id"])
    model = FireScorer(
        n_estimators=payload["n_estimators"],
        n_bits=payload["n_bits"],
        table_size=payload["table_size"],
        seed=rng,
    )
    model.estimators_ = [
        SketchEstimator(
            np.array(e["feature_indices"], dtype=np.int64),
            np.array(e["thresholds"], dtype=np.float64),
            np.array(e["int_weights"], dtype=np.int64),
            int(payload["table_size"]),
        )
        for e in payload["estimators"]
    ]
    model.rng_ = rng
    model.n_features_in_ = int(payload["n_features"])
    model.trained_n_ = int(payload["trained_n"])
    return model


def _load_fire1(payload: dict) -> Fire1Scorer:
    rng = RngSpec(payload["rng"]["master_seed"], payload["rng"]["stream_id"])
    model = Fire1Scorer(
        n_estimators=payload["n_estimators"],
        subspace_size=payload["subspace_size"],
        bin_width=payload["bin_width"],
        seed=rng,
    )
    model.estimators_ = [
        ProjectionEstimator(
            np.array(e["feature_indices"], dtype=np.int64),
            np.array(e["weights"], dtype=np.float64),
            float(e["bias"]),
            float(payload["bin_width"]),
        )
        for e in payload["estimators"]
    ]
    model.bucket_tables_ = [
        dict(zip((int(b) for b in t["buckets"]), (int(c) for c in t["counts"])))
        for t in payload["bucket_tables"]
    ]
    model.rng_ = rng
    model.subspace_size_ = int(payload["subspace_size"])
    model.n_features_in_ = int(payload["n_features"])
    model.trained_n_ = int(payload["trained_n"])
    return model
