"""Seeded synthetic data: planted-outlier datasets and drifting streams.

The planted generator lays out Gaussian clusters with known local and
global outliers for exercising the density scorers.  The stream
generators emit (sample, label) pairs one at a time and cover the three
drift flavors the streaming classifier must survive: an abrupt posterior
flip, an incrementally rotating decision boundary, and a virtual drift
where the marginal moves but the boundary stays put.

Everything is a pure function of its spec; the same spec always yields
the same data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import DataError, DataMatrix, LabelVector, RngSpec, as_rng_spec

ABRUPT = "abrupt"
INCREMENTAL = "incremental"
VIRTUAL = "virtual"


@dataclass(frozen=True)
class ClusterSpec:
    center: tuple
    sigma: float
    size: int


@dataclass(frozen=True)
class PlantedOutlierSpec:
    """Gaussian clusters plus planted local and global outliers.

    Global outliers are placed at least 10 cluster sigmas from every
    cluster center (base distance ``global_radius`` from the centroid of
    centers).  Local outliers sit just off the densest cluster, at a
    radius drawn from ``local_offset`` (in that cluster's sigma units).
    """

    clusters: tuple
    n_global: int
    global_radius: float
    n_local: int
    local_offset: tuple
    rng: RngSpec

    @property
    def total_points(self) -> int:
        return sum(c.size for c in self.clusters) + self.n_global + self.n_local


def default_planted_spec(seed=0) -> PlantedOutlierSpec:
    """A 2-D dense/sparse cluster pair with 5 local and 5 global outliers.

    The scale is chosen so that the projection scorer separates both
    outlier kinds at its default bin width of 0.1.
    """
    sigma = 0.15
    return PlantedOutlierSpec(
        clusters=(
            ClusterSpec(center=(0.0, 0.0), sigma=sigma, size=200),
            ClusterSpec(center=(12 * sigma, 0.0), sigma=sigma, size=50),
        ),
        n_global=5,
        global_radius=22 * sigma,
        n_local=5,
        local_offset=(2.0, 4.0),
        rng=as_rng_spec(seed),
    )


def gen_planted(spec: PlantedOutlierSpec):
    """Materialize a planted spec.

    Returns ``(matrix, labels, kinds)`` where ``labels`` marks outliers
    and ``kinds[i]`` is one of ``inlier`` / ``local`` / ``global``.
    Rows appear cluster by cluster, then local, then global outliers.
    """
    if not spec.clusters:
        raise DataError("planted spec needs at least one cluster")
    d = len(spec.clusters[0].center)
    for c in spec.clusters:
        if c.size < 1:
            raise DataError(f"cluster sizes must be >= 1, got {c.size}")
        if not c.sigma > 0:
            raise DataError(f"cluster sigma must be positive, got {c.sigma}")
        if len(c.center) != d:
            raise DataError("all cluster centers must share one dimension")
    rng = spec.rng.generator()
    rows = []
    kinds = []
    for c in spec.clusters:
        rows.append(np.asarray(c.center) + c.sigma * rng.standard_normal((c.size, d)))
        kinds.extend(["inlier"] * c.size)

    parent = max(spec.clusters, key=lambda c: c.size)
    others = [c.center for c in spec.clusters if c is not parent]
    # Locals lean toward the remaining clusters: a coarse cut that splits
    # one off from its parent then still lands it in occupied space, which
    # is what makes it local rather than global.
    toward = None
    if others:
        v = np.mean(np.asarray(others), axis=0) - np.asarray(parent.center)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            toward = v / norm
    lo, hi = spec.local_offset
    for _ in range(spec.n_local):
        jitter = _unit_vector(rng, d)
        if toward is None:
            direction = jitter
        else:
            v = toward + 0.35 * jitter
            direction = v / np.linalg.norm(v)
        radius = rng.uniform(lo, hi) * parent.sigma
        rows.append((np.asarray(parent.center) + radius * direction)[None, :])
        kinds.append("local")

    centers = np.array([c.center for c in spec.clusters])
    centroid = centers.mean(axis=0)
    max_sigma = max(c.sigma for c in spec.clusters)
    for _ in range(spec.n_global):
        for _attempt in range(1000):
            direction = _unit_vector(rng, d)
            radius = rng.uniform(spec.global_radius, 1.2 * spec.global_radius)
            point = centroid + radius * direction
            if all(np.linalg.norm(point - c) >= 10 * max_sigma for c in centers):
                break
        else:
            raise DataError(
                "could not place a global outlier >= 10 sigma from every center; "
                "increase global_radius"
            )
        rows.append(point[None, :])
        kinds.append("global")

    values = np.vstack(rows)
    kinds = np.array(kinds)
    labels = LabelVector.outlier_binary(kinds != "inlier")
    return DataMatrix.from_values(values), labels, kinds


def _unit_vector(rng, d):
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


@dataclass(frozen=True)
class DriftStreamSpec:
    """A labeled sample stream with a prescribed drift pattern.

    ``drift_points`` apply to the abrupt kind (label assignment of the
    two mixture components swaps at each); the incremental kind rotates
    its labeling hyperplane by ``rotate_per_step`` radians each step; the
    virtual kind translates the class-conditional means by a total of
    ``shift_total`` (in scale units) over the stream while the labeling
    boundary stays fixed.
    """

    kind: str
    n: int
    d: int = 2
    drift_points: tuple = ()
    rng: RngSpec = RngSpec(0)
    n_classes: int = 2
    class_sep: float = 1.0
    scale: float = 1.0
    rotate_per_step: float = 0.0
    shift_total: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"stream length must be >= 1, got {self.n}")
        if self.d < 1:
            raise DataError(f"stream dimension must be >= 1, got {self.d}")
        if any(not 0 <= p < self.n for p in self.drift_points):
            raise DataError(f"drift points must lie in [0, {self.n}), got {self.drift_points}")


def default_abrupt_spec(seed=0, n=20000, drift_at=10000) -> DriftStreamSpec:
    """The reference abrupt-drift stream: one posterior flip mid-stream.

    Class conditionals overlap heavily (their means sit one sigma apart)
    and the spatial scale spreads samples over many hash buckets, so the
    flip produces a sharp error spike followed by a visible recovery.
    """
    return DriftStreamSpec(
        kind=ABRUPT,
        n=n,
        d=2,
        drift_points=(drift_at,),
        rng=as_rng_spec(seed),
        class_sep=1.0,
        scale=10.0,
    )


def gen_stream(spec: DriftStreamSpec):
    """Dispatch to the generator matching ``spec.kind``."""
    if spec.kind == ABRUPT:
        return gen_abrupt(spec)
    if spec.kind == INCREMENTAL:
        return gen_incremental(spec)
    if spec.kind == VIRTUAL:
        return gen_virtual(spec)
    raise DataError(f"unknown stream kind {spec.kind!r}")


def gen_abrupt(spec: DriftStreamSpec):
    """Two fixed Gaussian components; their class assignment swaps at each
    drift point.  The marginal never changes, only the posterior."""
    rng = spec.rng.generator()
    half_sep = 0.5 * spec.class_sep * spec.scale
    means = np.zeros((2, spec.d))
    means[0, 0] = -half_sep
    means[1, 0] = half_sep
    flips = 0
    points = sorted(spec.drift_points)
    for t in range(spec.n):
        while flips < len(points) and points[flips] <= t:
            flips += 1
        component = int(rng.integers(2))
        x = means[component] + spec.scale * rng.standard_normal(spec.d)
        y = component ^ (flips & 1)
        yield x, y


def gen_incremental(spec: DriftStreamSpec):
    """Uniform samples labeled by the sign of a slowly rotating hyperplane."""
    rng = spec.rng.generator()
    if spec.d < 2 and spec.rotate_per_step != 0.0:
        raise DataError("a rotating labeling needs at least 2 dimensions")
    for t in range(spec.n):
        x = spec.scale * rng.uniform(-1.0, 1.0, size=spec.d)
        theta = spec.rotate_per_step * t
        proj = x[0] * math.cos(theta)
        if spec.d >= 2:
            proj += x[1] * math.sin(theta)
        yield x, int(proj >= 0.0)


def gen_virtual(spec: DriftStreamSpec):
    """Class blobs drift sideways while the labeling boundary stays fixed.

    Labels always follow the fixed rule sign(x[0]); the blob means
    translate along the second axis, so old and new samples occupy
    different regions of space with identical posteriors.
    """
    rng = spec.rng.generator()
    if spec.d < 2:
        raise DataError("virtual drift needs at least 2 dimensions")
    half_sep = 0.5 * spec.class_sep * spec.scale
    denom = max(spec.n - 1, 1)
    for t in range(spec.n):
        component = int(rng.integers(2))
        center = np.zeros(spec.d)
        center[0] = -half_sep if component == 0 else half_sep
        center[1] = spec.shift_total * spec.scale * (t / denom)
        x = center + spec.scale * rng.standard_normal(spec.d)
        yield x, int(x[0] > 0.0)
