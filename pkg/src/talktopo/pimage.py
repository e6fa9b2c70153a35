"""Persistence-image vectors: diagrams rasterized onto a fixed grid.

A diagram's finite points move to birth-persistence coordinates, each
becomes an isotropic Gaussian weighted by a function that vanishes on
the diagonal, and the summed surface is integrated exactly over every
pixel of a fixed rectangular grid (products of one-dimensional Gaussian
CDF differences, no sampling). The flattened pixel vector has constant
length however many points the diagram carries, which is what lets the
classifiers consume it next to the document features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .persistence import PersistenceDiagram

_WEIGHTS = ("linear_persistence", "constant")


@dataclass(frozen=True)
class PivConfig:
    """Grid geometry, kernel width, and weighting for rasterization.

    variance is the per-axis Gaussian variance (sigma squared).
    weight_ceiling is the persistence at which the linear weight
    saturates at 1; the string "auto" defers to the maximum persistence
    seen in whatever point set is being rasterized, while corpus-level
    runs resolve it once over the training split and pass the number.
    """

    pixels_per_axis: int = 30
    variance: float = 0.01
    birth_range: tuple[float, float] = (0.0, 1.0)
    persistence_range: tuple[float, float] = (0.0, 1.0)
    weight: str = "linear_persistence"
    weight_ceiling: float | str = "auto"

    def __post_init__(self):
        if int(self.pixels_per_axis) != self.pixels_per_axis or self.pixels_per_axis < 1:
            raise ValueError(f"pixels_per_axis must be an integer >= 1, got {self.pixels_per_axis}")
        object.__setattr__(self, "pixels_per_axis", int(self.pixels_per_axis))
        if not (self.variance > 0.0 and math.isfinite(self.variance)):
            raise ValueError(f"variance must be positive and finite, got {self.variance}")
        for name in ("birth_range", "persistence_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a nonempty finite interval, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.weight not in _WEIGHTS:
            raise ValueError(f"weight must be one of {_WEIGHTS}, got {self.weight!r}")
        if isinstance(self.weight_ceiling, str):
            if self.weight_ceiling != "auto":
                raise ValueError(
                    f'weight_ceiling must be a positive number or "auto", got {self.weight_ceiling!r}'
                )
        else:
            c = float(self.weight_ceiling)
            if not (c > 0.0 and math.isfinite(c)):
                raise ValueError(f"weight_ceiling must be positive and finite, got {c}")
            object.__setattr__(self, "weight_ceiling", c)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def to_json_dict(self) -> dict:
        return {
            "pixels_per_axis": self.pixels_per_axis,
            "variance": self.variance,
            "birth_range": list(self.birth_range),
            "persistence_range": list(self.persistence_range),
            "weight": self.weight,
            "weight_ceiling": self.weight_ceiling,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PivConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        kwargs = dict(data)
        for name in ("birth_range", "persistence_range"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)


@dataclass(frozen=True)
class PersistenceImage:
    """Flattened pixel grid plus the config that produced it.

    values runs row-major from the (min birth, min persistence) corner:
    birth advances fastest, persistence advances every pixels_per_axis
    entries. grid() restores the 2-D [persistence, birth] layout.
    """

    values: np.ndarray
    config: PivConfig

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        p = self.config.pixels_per_axis
        if v.shape != (p * p,):
            raise ValueError(f"expected {p * p} pixel values, got {v.shape}")
        if np.any(v < 0.0) or np.any(~np.isfinite(v)):
            raise ValueError("pixel values must be finite and non-negative")
        object.__setattr__(self, "values", v)

    def grid(self) -> np.ndarray:
        p = self.config.pixels_per_axis
        return self.values.reshape(p, p)


def birth_persistence_transform(d: PersistenceDiagram, dim: int) -> np.ndarray:
    """(k, 2) array of (birth, death - birth) for one dimension.

    Infinite-death points cannot be placed at a finite persistence, so
    their presence in the selected dimension is an error; drop
    essentials first (finite_pairs) if that is what you mean.
    """
    pts = d.pairs(dim)
    if np.any(np.isinf(pts[:, 1])):
        raise ValueError(
            f"dimension {dim} contains infinite-death points; filter essentials first"
        )
    return np.stack([pts[:, 0], pts[:, 1] - pts[:, 0]], axis=1)


def resolve_weight_ceiling(cfg: PivConfig, points: np.ndarray) -> float:
    """Numeric saturation point for the linear weight under this config.

    "auto" resolves to the maximum persistence among the given points,
    falling back to 1.0 when there is none to measure (empty input or
    all points on the diagonal, whose weights are 0 regardless).
    """
    if cfg.weight_ceiling != "auto":
        return float(cfg.weight_ceiling)
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return 1.0
    top = float(pts[:, 1].max())
    return top if top > 0.0 else 1.0


def _point_weights(pts: np.ndarray, cfg: PivConfig) -> np.ndarray:
    if cfg.weight == "constant":
        return np.ones(len(pts))
    ceiling = resolve_weight_ceiling(cfg, pts)
    return np.minimum(pts[:, 1] / ceiling, 1.0)


def surface_value(points, x, y, cfg: PivConfig):
    """Weighted Gaussian-sum surface evaluated at (x, y), broadcasting.

    points are birth-persistence pairs; each contributes its weight
    times an isotropic bivariate Gaussian density centered on it. x and
    y may be scalars or broadcast-compatible arrays.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(pts) == 0:
        out = np.zeros(np.broadcast(x, y).shape)
        return float(out) if out.ndim == 0 else out
    w = _point_weights(pts, cfg)
    two_var = 2.0 * cfg.variance
    gx = np.exp(-((x[..., None] - pts[:, 0]) ** 2) / two_var)
    gy = np.exp(-((y[..., None] - pts[:, 1]) ** 2) / two_var)
    out = ((w / (math.pi * two_var)) * gx * gy).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def rasterize(
    d: PersistenceDiagram, dim: int = 1, cfg: PivConfig | None = None
) -> PersistenceImage:
    """Integrate the diagram's surface exactly over every grid pixel.

    Each pixel holds the integral of the weighted Gaussian sum over its
    rectangle: per point, the product of one Gaussian CDF difference per
    axis, scaled by the point's weight and summed in diagram order.
    Gaussians are not truncated, so mass outside the grid is simply not
    collected and an empty diagram yields the exact zero vector.
    """
    cfg = cfg if cfg is not None else PivConfig()
    pts = birth_persistence_transform(d, dim)
    p = cfg.pixels_per_axis
    if len(pts) == 0:
        return PersistenceImage(values=np.zeros(p * p), config=cfg)
    w = _point_weights(pts, cfg)
    sigma = cfg.sigma
    edges_b = np.linspace(cfg.birth_range[0], cfg.birth_range[1], p + 1)
    edges_p = np.linspace(cfg.persistence_range[0], cfg.persistence_range[1], p + 1)
    cdf_b = ndtr((edges_b[None, :] - pts[:, 0:1]) / sigma)
    cdf_p = ndtr((edges_p[None, :] - pts[:, 1:2]) / sigma)
    mass_b = np.diff(cdf_b, axis=1)
    mass_p = np.diff(cdf_p, axis=1)
    grid = np.einsum("ki,kj->ij", w[:, None] * mass_p, mass_b)
    return PersistenceImage(values=grid.ravel(), config=cfg)


def piv_stability_constant(cfg: PivConfig) -> float:
    """Lipschitz bound L with ||PIV(D) - PIV(D')||_inf <= L * W1(D, D').

    Derivation: along an optimal diagram matching, each matched pair
    changes a pixel by at most |f(u) - f(v)| * G(u) + f(v) * |G(u) - G(v)|
    where G is the per-pixel CDF-difference product. G and f are bounded
    by 1, f is (1/ceiling)-Lipschitz, and each CDF factor moves at most
    1/(sigma * sqrt(2 pi)) per unit of mean shift (two factors). The
    birth-persistence change of coordinates stretches the matching's
    L-infinity cost by at most 2. Requires the diagonal-vanishing linear
    weight with a numeric ceiling; the constant weight admits no such
    bound because points can retire to the diagonal at finite cost while
    still carrying weight.
    """
    if cfg.weight != "linear_persistence":
        raise ValueError("stability constant requires the linear_persistence weight")
    if cfg.weight_ceiling == "auto":
        raise ValueError("stability constant needs a numeric weight_ceiling")
    c = float(cfg.weight_ceiling)
    return 2.0 / c + 4.0 / (cfg.sigma * math.sqrt(2.0 * math.pi))
