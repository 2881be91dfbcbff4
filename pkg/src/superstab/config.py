"""Finite configurations and the half-open cube partition of R^d.

A cube with rib ``lam`` and label ``r`` is
``{x : lam*(r_i - 1/2) <= x_i < lam*(r_i + 1/2)}``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

CubeIndex = tuple[int, ...]
OccupancyMap = dict[CubeIndex, int]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionSpec:
    lam: float
    dimension: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"cube rib must be positive, got {self.lam!r}")
        if int(self.dimension) < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class Configuration:
    """Ordered point list; duplicates are kept on purpose."""

    points: np.ndarray = field(repr=False)
    dimension: int = 1

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.size == 0:
            pts = pts.reshape(0, self.dimension)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dimension == 1 else pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DimensionError(
                f"points have shape {pts.shape}, expected (n, {self.dimension})")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points, dimension: int | None = None) -> "Configuration":
        arr = np.asarray(points, dtype=np.float64)
        if dimension is None:
            dimension = 1 if arr.ndim <= 1 else arr.shape[1]
        return cls(arr, dimension)

    def __len__(self) -> int:
        return self.points.shape[0]

    def translated(self, a) -> "Configuration":
        return Configuration(self.points + np.asarray(a, dtype=np.float64), self.dimension)


def _coord_index(x, lam) -> int:
    r = math.floor(x / lam + 0.5)
    # division rounding can land one cell off; re-check the defining inequalities
    if x < lam * (r - 0.5):
        r -= 1
    elif x >= lam * (r + 0.5):
        r += 1
    return int(r)


def cube_index(x, spec: PartitionSpec) -> CubeIndex:
    coords = [x] if np.isscalar(x) else list(x)
    if len(coords) != spec.dimension:
        raise DimensionError(f"point of dimension {len(coords)} in a {spec.dimension}-d partition")
    return tuple(_coord_index(c, spec.lam) for c in coords)


def cube_indices(points: np.ndarray, spec: PartitionSpec) -> np.ndarray:
    """Vectorised :func:`cube_index` for an ``(n, d)`` array."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != spec.dimension:
        raise DimensionError(f"expected (n, {spec.dimension}) array, got {pts.shape}")
    lam = float(spec.lam)
    r = np.floor(pts / lam + 0.5)
    r = np.where(pts < lam * (r - 0.5), r - 1, r)
    r = np.where(pts >= lam * (r + 0.5), r + 1, r)
    return r.astype(np.int64)


def occupancy(gamma: Configuration, spec: PartitionSpec) -> OccupancyMap:
    if gamma.dimension != spec.dimension:
        raise DimensionError("configuration and partition dimensions differ")
    if len(gamma) == 0:
        return {}
    return dict(Counter(map(tuple, cube_indices(gamma.points, spec).tolist())))


def occupancy_power_sum(occ: OccupancyMap, m=2):
    if m < 1:
        raise ValueError("exponent m must be >= 1")
    return sum(c ** m for c in occ.values())
