"""Point clouds and pairwise dissimilarity matrices.

A talk is represented by its sentence cloud: one embedding vector per
sentence. The default dissimilarity is the normalized angular distance

    d(u, v) = arccos(clamp(cos(u, v), -1, 1)) / pi

which is a true metric on directions with range [0, 1]: 0 for positively
collinear vectors, 1/2 at 90 degrees, 1 for antipodal vectors.

``paper_literal`` keeps the alternative formula ``1 - cos(u, v) / pi``
exactly as printed in the source write-up. It is *not* a metric (identical
vectors get distance 1 - 1/pi, and antipodal ones exceed 1), so it is off
by default and exists only for fidelity experiments; see
``paper_literal_dissimilarity``. Euclidean distance is included as a third
option for synthetic-data testing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

METRICS = ("angular", "paper_literal", "euclidean")

_ZERO_TOL = 0.0  # a vector is "zero" only if its norm is exactly 0


@dataclass(frozen=True)
class PointCloud:
    """N embedding vectors of identical dimension d, plus a talk id.

    Zero vectors are rejected at construction: cosine (and therefore the
    angular metric) is undefined for them.
    """

    points: np.ndarray
    id: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {pts.shape}")
        n, d = pts.shape
        if n < 1 or d < 1:
            raise ValueError(f"need at least one point of dimension >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            bad = int(np.argwhere(~np.isfinite(pts).all(axis=1))[0, 0])
            raise ValueError(f"point {bad} of cloud '{self.id}' has non-finite coordinates")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(norms <= _ZERO_TOL):
            bad = int(np.argmin(norms))
            raise ValueError(f"point {bad} of cloud '{self.id}' is the zero vector")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense symmetric matrix of pairwise dissimilarities.

    For the proper metrics (angular, euclidean) the diagonal is exactly
    zero. The paper_literal mode intentionally violates this (its
    self-distance is 1 - 1/pi); that is the documented reason it is not
    the default Rips input.
    """

    entries: np.ndarray
    metric: str = "angular"
    source_id: str = ""

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"entries must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("distance matrix has non-finite entries")
        if not np.array_equal(m, m.T):
            raise ValueError("distance matrix is not exactly symmetric")
        if self.metric != "paper_literal":
            if np.any(np.diag(m) != 0.0):
                raise ValueError("distance matrix diagonal must be exactly zero")
            if np.any(m < 0.0):
                raise ValueError("distances must be non-negative")
        if self.metric == "angular" and np.any(m > 1.0):
            raise ValueError("angular distances must lie in [0, 1]")
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def max_distance(self) -> float:
        return float(self.entries.max())


def _checked_pair(u, v):
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu <= _ZERO_TOL:
        raise ValueError("zero-norm vector (first argument, point index 0)")
    if nv <= _ZERO_TOL:
        raise ValueError("zero-norm vector (second argument, point index 1)")
    return u, v, nu, nv


def _cosine(u, v, nu, nv) -> float:
    # clamp absorbs floating-point drift slightly outside [-1, 1]
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def angular_dissimilarity(u, v) -> float:
    """arccos(cos(u, v)) / pi, in [0, 1]. Symmetric; 0 iff same direction."""
    u, v, nu, nv = _checked_pair(u, v)
    return float(np.arccos(_cosine(u, v, nu, nv)) / np.pi)


def paper_literal_dissimilarity(u, v) -> float:
    """The printed formula 1 - cos(u, v)/pi, verbatim.

    Range is [1 - 1/pi, 1 + 1/pi]; self-distance is 1 - 1/pi != 0, so this
    is not a metric. Kept behind the ``paper_literal`` switch only.
    """
    u, v, nu, nv = _checked_pair(u, v)
    return float(1.0 - _cosine(u, v, nu, nv) / np.pi)


def euclidean_distance(u, v) -> float:
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return float(np.sqrt(np.sum((u - v) ** 2)))


def _cosine_gram(points: np.ndarray) -> np.ndarray:
    """Pairwise cosines, exactly symmetric, clipped to [-1, 1]."""
    unit = points / np.linalg.norm(points, axis=1, keepdims=True)
    g = unit @ unit.T
    # mirror the upper triangle so G[i,j] == G[j,i] bit for bit
    g = np.triu(g, 1)
    g = g + g.T
    return np.clip(g, -1.0, 1.0)


def pairwise_distances(cloud: PointCloud, metric: str = "angular") -> DistanceMatrix:
    """Dense dissimilarity matrix of a cloud under the chosen metric.

    Every entry equals the corresponding scalar function applied to the
    pair (to within one rounding of the normalization), and the result is
    exactly symmetric by construction.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose one of {METRICS}")
    pts = cloud.points
    n = pts.shape[0]
    if metric == "euclidean":
        m = squareform(pdist(pts, metric="euclidean")) if n > 1 else np.zeros((1, 1))
    else:
        g = _cosine_gram(pts)
        if metric == "angular":
            m = np.arccos(g) / np.pi
            np.fill_diagonal(m, 0.0)
            m = np.clip(m, 0.0, 1.0)
        else:  # paper_literal: self-distance is deliberately nonzero
            m = 1.0 - g / np.pi
            np.fill_diagonal(m, 1.0 - 1.0 / np.pi)
    return DistanceMatrix(entries=m, metric=metric, source_id=cloud.id)
