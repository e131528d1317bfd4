"""Shared data model: validated matrices, labels, and seeded randomness.

Every random draw in this package flows through :class:`RngSpec`, which
derives an independent substream for each ensemble member from a single
master seed.  Substreams are a pure function of ``(master_seed, index)``,
so results never depend on the order in which estimators are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OUTLIER_BINARY = "outlier-binary"
CLASS_LABEL = "class-label"


class FirekitError(Exception):
    """Base class for errors raised by this package."""


class DataError(FirekitError):
    """Input data violates a precondition (non-finite cells, bad shapes, ...)."""


class ModelFormatError(FirekitError):
    """A serialized model file is unreadable, corrupt, or from another version."""


@dataclass(frozen=True)
class DataMatrix:
    """An N x d matrix of finite reals with cached per-feature ranges.

    Instances are immutable: the wrapped arrays are marked read-only, so a
    matrix can be shared freely across threads.
    """

    values: np.ndarray
    feature_mins: np.ndarray
    feature_maxs: np.ndarray

    @classmethod
    def from_values(cls, values) -> "DataMatrix":
        arr = np.array(values, dtype=np.float64, copy=True, order="C")
        if arr.ndim != 2:
            raise DataError(f"expected a 2-D matrix, got array of shape {arr.shape}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise DataError(f"matrix needs at least one row and one column, got {n}x{d}")
        finite = np.isfinite(arr)
        if not finite.all():
            i, j = np.argwhere(~finite)[0]
            raise DataError(f"non-finite value {arr[i, j]!r} at row {i}, column {j}")
        mins = arr.min(axis=0)
        maxs = arr.max(axis=0)
        for a in (arr, mins, maxs):
            a.setflags(write=False)
        return cls(arr, mins, maxs)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]


def as_matrix(X) -> DataMatrix:
    """Coerce an array-like or :class:`DataMatrix` into a validated matrix."""
    if isinstance(X, DataMatrix):
        return X
    return DataMatrix.from_values(X)


@dataclass(frozen=True)
class LabelVector:
    """Per-row labels: binary outlier flags or categorical class labels.

    For ``outlier-binary`` the values are booleans (True marks an outlier).
    For ``class-label`` the values are arbitrary hashable labels and
    ``class_registry`` lists the distinct labels in first-seen order.
    """

    kind: str
    values: np.ndarray
    class_registry: tuple = ()

    @classmethod
    def outlier_binary(cls, flags) -> "LabelVector":
        arr = np.asarray(flags)
        if arr.dtype != np.bool_:
            uniq = set(np.unique(arr).tolist())
            if not uniq <= {0, 1, 0.0, 1.0, False, True}:
                raise DataError(f"outlier labels must be 0/1, got values {sorted(uniq)!r}")
            arr = arr.astype(bool)
        else:
            arr = arr.copy()
        if arr.ndim != 1 or arr.size < 1:
            raise DataError("labels must form a non-empty 1-D vector")
        arr.setflags(write=False)
        return cls(OUTLIER_BINARY, arr)

    @classmethod
    def class_labels(cls, values) -> "LabelVector":
        vals = list(values)
        if not vals:
            raise DataError("labels must form a non-empty 1-D vector")
        registry: list = []
        seen = set()
        for v in vals:
            if v not in seen:
                seen.add(v)
                registry.append(v)
        arr = np.empty(len(vals), dtype=object)
        arr[:] = vals
        arr.setflags(write=False)
        return cls(CLASS_LABEL, arr, tuple(registry))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def outlier_mask(self) -> np.ndarray:
        if self.kind != OUTLIER_BINARY:
            raise DataError(f"labels of kind {self.kind!r} carry no outlier flags")
        return self.values

    @property
    def n_outliers(self) -> int:
        return int(self.outlier_mask.sum())


@dataclass(frozen=True)
class RngSpec:
    """Deterministic randomness source keyed by ``(master_seed, stream_id)``.

    ``generator()`` returns the stream's own generator; ``estimator_generator(i)``
    returns the i-th substream.  Both are pure functions of the spec, so
    regenerating with equal fields reproduces identical draws.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise DataError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if int(self.stream_id) < 0:
            raise DataError(f"stream_id must be non-negative, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id),))
        )

    def estimator_generator(self, index: int) -> np.random.Generator:
        if index < 0:
            raise DataError(f"estimator index must be non-negative, got {index}")
        return np.random.default_rng(
            np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id), int(index)))
        )


def as_rng_spec(seed) -> RngSpec:
    """Accept either an integer master seed or a ready-made :class:`RngSpec`."""
    if isinstance(seed, RngSpec):
        return seed
    if seed is None:
        raise DataError("a seed is required; wall-clock seeding is not supported")
    return RngSpec(int(seed))
