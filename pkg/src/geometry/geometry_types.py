from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from util.errors import InvalidArgumentError


class NormKind(Enum):

    EUCLIDEAN = "euclidean"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class Norm:
    """
    A norm on R^d.

    Attributes:
        kind: euclidean or chebyshev.
        dimension: d, the covariate dimension.
    """
    kind: NormKind = NormKind.EUCLIDEAN
    dimension: int = 1

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", NormKind(self.kind))
        if int(self.dimension) < 1:
            raise InvalidArgumentError(f"Norm dimension must be >= 1, got {self.dimension}.")

    @property
    def minkowski_p(self) -> float:
        """The p of the equivalent Minkowski norm, as the kd-tree expects it."""
        return 2.0 if self.kind is NormKind.EUCLIDEAN else np.inf

    def comparison_keys(self, points: np.ndarray, x: np.ndarray) -> np.ndarray:
        """
        Order-preserving stand-ins for the distances from x to every row of points:
        squared distances for euclidean, the distances themselves for chebyshev.

        Squared euclidean distances are accumulated coordinate by coordinate, so a
        point gets bit-identical keys whether it is evaluated alone or inside a batch.
        """
        diff = points - x
        if self.kind is NormKind.CHEBYSHEV:
            return np.abs(diff).max(axis=1)
        squared = diff[:, 0] * diff[:, 0]
        for j in range(1, diff.shape[1]):
            squared = squared + diff[:, j] * diff[:, j]
        return squared

    def key_to_distance(self, key):
        return np.sqrt(key) if self.kind is NormKind.EUCLIDEAN else key

    def distance_to_key(self, distance: float) -> float:
        return distance * distance if self.kind is NormKind.EUCLIDEAN else distance

    def distances(self, points: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Distances from x to every row of points."""
        return self.key_to_distance(self.comparison_keys(points, x))

    def distance(self, a, b) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        return float(self.distances(a.reshape(1, -1), b)[0])


@dataclass(frozen=True)
class BallVolume:
    """Volume V_d of the unit ball of a norm."""
    norm: Norm
    volume: float


@dataclass(frozen=True)
class NeighborQuery:
    """
    Result of a k-NN radius query.

    Attributes:
        center: the query point x.
        k: number of neighbors requested.
        radius: the k-NN radius, smallest tau with at least k points in the closed ball B(x, tau).
        in_ball: sorted indices of every sample point at distance <= radius.
        tie_count: number of points at distance exactly radius.
    """
    center: np.ndarray
    k: int
    radius: float
    in_ball: np.ndarray
    tie_count: int

    @property
    def in_ball_count(self) -> int:
        return int(self.in_ball.shape[0])

    @property
    def has_excess_ties(self) -> bool:
        """True when boundary ties put more than k points in the ball."""
        return self.in_ball_count > self.k


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    An immutable n x d point cloud with its kd-tree.

    The tree is built once at construction; queries never mutate it, so one
    cloud can be shared by concurrent readers.
    """
    points: np.ndarray
    index: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidArgumentError("A point cloud needs at least one point.")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("Point cloud coordinates must be finite.")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "index", cKDTree(pts))

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def translated(self, shift) -> "PointCloud":
        return PointCloud(self.points + np.asarray(shift, dtype=float))
