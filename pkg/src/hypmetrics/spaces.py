"""Point clouds, base distance functions, and distance-matrix materialization.

Everything downstream (the punctured-space constructors, the four-point
delta engine, the inequality checkers) consumes either a ``DistanceMatrix``
or a bare ``(i, j) -> float`` oracle built here.

Base distances:

* ``euclidean_distance`` -- the l2 distance in any dimension.
* ``taxicab_distance``   -- sum of coordinate differences, any dimension.
* ``arctan_split_distance`` -- the planar metrics
  ``d1(x, y) = |x1 - y1| + arctan|x2 - y2|`` and
  ``d2(x, y) = |x2 - y2| + arctan|x1 - y1|``, plus their sum ``d1 + d2``
  (the sum fails to be Gromov hyperbolic even though d1 and d2 are).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import InputError

Vector = Sequence[float]
MetricFn = Callable[[Vector, Vector], float]

#: Metric selector strings accepted everywhere a base metric is named.
METRIC_NAMES = ("euclidean", "taxicab", "d1", "d2", "d1+d2")


def _vec_pair(x: Vector, y: Vector) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise InputError(
            f"coordinate vectors must share one dimension, got shapes {a.shape} and {b.shape}"
        )
    return a, b


def euclidean_distance(x: Vector, y: Vector) -> float:
    """l2 distance between two coordinate vectors of equal dimension."""
    a, b = _vec_pair(x, y)
    d = a - b
    return float(np.sqrt(np.sum(d * d)))


def taxicab_distance(x: Vector, y: Vector) -> float:
    """Sum of absolute coordinate differences (dimension-agnostic)."""
    a, b = _vec_pair(x, y)
    return float(np.sum(np.abs(a - b)))


def arctan_split_distance(which: str, x: Vector, y: Vector) -> float:
    """One of the planar arctan-split metrics: ``d1``, ``d2``, or their sum.

    ``d1 = |x1-y1| + arctan|x2-y2|``; ``d2`` swaps the coordinate roles;
    ``sum`` returns ``d1 + d2``. Points must be 2-dimensional.
    """
    a, b = _vec_pair(x, y)
    if a.shape[0] != 2:
        raise InputError(f"arctan-split metrics need dim 2, got dim {a.shape[0]}")
    u = abs(float(a[0]) - float(b[0]))
    v = abs(float(a[1]) - float(b[1]))
    if which == "d1":
        return u + math.atan(v)
    if which == "d2":
        return v + math.atan(u)
    if which in ("sum", "d1+d2"):
        return (u + math.atan(v)) + (v + math.atan(u))
    raise InputError(f"unknown arctan-split selector {which!r} (want d1, d2, or sum)")


def _scalar_metric(name: str) -> MetricFn:
    if name == "euclidean":
        return euclidean_distance
    if name == "taxicab":
        return taxicab_distance
    if name == "d1":
        return lambda x, y: arctan_split_distance("d1", x, y)
    if name == "d2":
        return lambda x, y: arctan_split_distance("d2", x, y)
    if name == "d1+d2":
        return lambda x, y: arctan_split_distance("sum", x, y)
    raise InputError(f"unknown metric {name!r}; expected one of {METRIC_NAMES}")


class PointCloud:
    """Immutable ordered collection of labeled points in R^dim."""

    __slots__ = ("_points", "_labels")

    def __init__(self, points, labels: Sequence[str] | None = None):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError("point cloud must be a nonempty n x dim array")
        if not np.all(np.isfinite(pts)):
            raise InputError("point cloud contains NaN or infinite coordinates")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != pts.shape[0]:
                raise InputError("label count does not match point count")
            if len(set(labels)) != len(labels):
                raise InputError("point labels must be unique")
        pts.setflags(write=False)
        self._points = pts
        self._labels = labels

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def point(self, i: int) -> np.ndarray:
        return self._points[i]

    def label(self, i: int) -> str:
        return self._labels[i] if self._labels is not None else f"x{i}"

    def subset(self, indices: Sequence[int]) -> "PointCloud":
        idx = list(indices)
        labels = [self._labels[i] for i in idx] if self._labels is not None else None
        return PointCloud(self._points[idx], labels)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "points": [
                {"label": self.label(i), "coords": [float(v) for v in self._points[i]]}
                for i in range(len(self))
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PointCloud":
        try:
            dim = int(obj["dim"])
            rows = obj["points"]
            coords = [row["coords"] for row in rows]
            labels = [row["label"] for row in rows] if rows and "label" in rows[0] else None
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed point-cloud JSON: {exc}") from exc
        cloud = cls(coords, labels)
        if cloud.dim != dim:
            raise InputError(f"declared dim {dim} does not match coords of dim {cloud.dim}")
        return cloud

    def save(self, path: str | Path) -> None:
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
            return
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label"] + [f"x{j + 1}" for j in range(self.dim)])
            for i in range(len(self)):
                writer.writerow([self.label(i)] + [repr(float(v)) for v in self._points[i]])

    @classmethod
    def from_csv(cls, path: str | Path) -> "PointCloud":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise InputError(f"{path}: expected a header row and at least one point")
        labels, coords = [], []
        for row in rows[1:]:
            if not row:
                continue
            labels.append(row[0])
            try:
                coords.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise InputError(f"{path}: bad coordinate in row {row!r}: {exc}") from exc
        return cls(coords, labels)


def load_point_cloud(path: str | Path) -> PointCloud:
    """Load a cloud from ``.json`` or ``.csv`` (dispatch on suffix)."""
    path = Path(path)
    if path.suffix == ".json":
        return PointCloud.from_dict(json.loads(path.read_text(encoding="utf-8")))
    return PointCloud.from_csv(path)


def random_cloud(
    n: int, dim: int = 2, seed: int = 0, low: float = 0.0, high: float = 1.0
) -> PointCloud:
    """Seeded uniform cloud in ``[low, high)^dim``.

    The generator is pinned to PCG64 with a single row-major
    ``uniform(low, high, size=(n, dim))`` draw, so a given seed reproduces
    the same cloud on any platform.
    """
    if n < 1:
        raise InputError("need n >= 1 points")
    if dim < 1:
        raise InputError("need dim >= 1")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    pts = rng.uniform(low, high, size=(n, dim))
    return PointCloud(pts, [f"x{i}" for i in range(n)])


class DistanceMatrix:
    """Symmetric nonnegative matrix with zero diagonal.

    The structural invariants (symmetry, zero diagonal, nonnegativity) are
    validated exactly on construction -- not within a tolerance. The
    triangle inequality is deliberately NOT an invariant: several distance
    functions materialized here fail it, and the checkers must be able to
    see that.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InputError("distance matrix must be square and nonempty")
        if not np.all(np.isfinite(m)):
            raise InputError("distance matrix contains NaN or infinite entries")
        if np.any(m < 0.0):
            raise InputError("distance matrix has negative entries")
        if np.any(np.diagonal(m) != 0.0):
            raise InputError("distance matrix diagonal must be exactly zero")
        if not np.array_equal(m, m.T):
            raise InputError("distance matrix must be exactly symmetric")
        m.setflags(write=False)
        self._entries = m

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    def __call__(self, i: int, j: int) -> float:
        return float(self._entries[i, j])

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": [[float(v) for v in row] for row in self._entries]}

    @classmethod
    def from_dict(cls, obj: dict) -> "DistanceMatrix":
        try:
            n = int(obj["n"])
            entries = obj["entries"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed distance-matrix JSON: {exc}") from exc
        dm = cls(entries)
        if dm.n != n:
            raise InputError(f"declared n {n} does not match {dm.n} rows")
        return dm

    def save(self, path: str | Path) -> None:
        path = Path(path)
        if path.suffix == ".csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                for row in self._entries:
                    writer.writerow([repr(float(v)) for v in row])
            return
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path: str | Path) -> "DistanceMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        return cls(rows)


def load_distance_matrix(path: str | Path) -> DistanceMatrix:
    path = Path(path)
    if path.suffix == ".csv":
        return DistanceMatrix.from_csv(path)
    return DistanceMatrix.from_dict(json.loads(path.read_text(encoding="utf-8")))


def pairwise_distances(points: np.ndarray, metric: str | MetricFn) -> np.ndarray:
    """Dense pairwise distances under a named metric or a scalar callable.

    The named paths are vectorized; a callable falls back to filling the
    upper triangle and mirroring, which also guarantees exact symmetry for
    user-supplied functions.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = pts.shape[0]
    if callable(metric):
        m = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                v = float(metric(pts[i], pts[j]))
                m[i, j] = v
                m[j, i] = v
        return m
    if metric == "euclidean":
        diff = pts[:, None, :] - pts[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == "taxicab":
        diff = pts[:, None, :] - pts[None, :, :]
        return np.sum(np.abs(diff), axis=-1)
    if metric in ("d1", "d2", "d1+d2"):
        if pts.shape[1] != 2:
            raise InputError(f"metric {metric!r} needs dim 2, got dim {pts.shape[1]}")
        du = np.abs(pts[:, 0][:, None] - pts[:, 0][None, :])
        dv = np.abs(pts[:, 1][:, None] - pts[:, 1][None, :])
        if metric == "d1":
            return du + np.arctan(dv)
        if metric == "d2":
            return dv + np.arctan(du)
        return (du + np.arctan(dv)) + (dv + np.arctan(du))
    raise InputError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")


def build_distance_matrix(cloud: PointCloud, metric: str | MetricFn = "euclidean") -> DistanceMatrix:
    """Materialize the full distance matrix of a cloud under a base metric."""
    if len(cloud) == 0:
        raise InputError("cannot build a distance matrix from an empty cloud")
    return DistanceMatrix(pairwise_distances(cloud.points, metric))
