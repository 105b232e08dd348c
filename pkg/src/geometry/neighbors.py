"""
Exact k-NN radius and closed-ball range queries.

Both the kd-tree path and the brute-force oracle compare points on
`Norm.comparison_keys` (squared euclidean distances); the tree only prunes
candidates with a slightly inflated radius, so membership, ties and the reported
radius never depend on the tree's own floating point arithmetic.
"""
import logging

import numpy as np
from scipy.special import gamma

from util.errors import InvalidArgumentError
from util.tools import as_point

from .geometry_types import BallVolume, NeighborQuery, Norm, NormKind, PointCloud

# Relative and absolute slack for candidate pruning.
_PRUNE_RELATIVE = 1e-9
_PRUNE_ABSOLUTE = 1e-300

METHODS = ("index", "brute")


def unit_ball_volume(norm: Norm) -> BallVolume:
    d = norm.dimension
    if norm.kind is NormKind.CHEBYSHEV:
        volume = float(2.0 ** d)
    else:
        volume = float(np.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0))
    return BallVolume(norm=norm, volume=volume)


def _check_norm(cloud: PointCloud, norm: Norm):
    if norm.dimension != cloud.dimension:
        raise InvalidArgumentError(
            f"Norm dimension {norm.dimension} does not match point cloud dimension {cloud.dimension}."
        )


def _candidates(cloud: PointCloud, x: np.ndarray, radius: float, norm: Norm) -> np.ndarray:
    inflated = radius * (1.0 + _PRUNE_RELATIVE) + _PRUNE_ABSOLUTE
    found = cloud.index.query_ball_point(x, r=inflated, p=norm.minkowski_p)
    return np.asarray(sorted(found), dtype=np.intp)


def _from_keys(x: np.ndarray, k: int, indices: np.ndarray, keys: np.ndarray, norm: Norm) -> NeighborQuery:
    radius_key = np.partition(keys, k - 1)[k - 1]
    in_ball = indices[keys <= radius_key]
    in_ball.setflags(write=False)
    tie_count = int(np.count_nonzero(keys == radius_key))
    radius = float(norm.key_to_distance(radius_key))
    return NeighborQuery(center=x, k=k, radius=radius, in_ball=in_ball, tie_count=tie_count)


def knn_radius(cloud: PointCloud, x, k: int, norm: Norm, method: str = "index") -> NeighborQuery:
    """
    Smallest radius whose closed ball around x holds at least k sample points.

    Args:
        cloud: the sample covariates.
        x: query point.
        k: neighbor count, 1 <= k <= n.
        norm: distance used for the ball.
        method: "index" prunes with the kd-tree, "brute" sorts all n distances.

    Returns:
        NeighborQuery listing every point at distance <= radius, so boundary
        ties beyond k are included.
    """
    if cloud is None or cloud.size < 1:
        raise InvalidArgumentError("Cannot query an empty point cloud.")
    _check_norm(cloud, norm)
    if isinstance(k, bool) or int(k) != k or not (1 <= int(k) <= cloud.size):
        raise InvalidArgumentError(f"k must be an integer in [1, {cloud.size}], got {k}.")
    k = int(k)
    if method not in METHODS:
        raise InvalidArgumentError(f"Unknown neighbor method '{method}', expected one of {METHODS}.")
    point = as_point(x, cloud.dimension)

    if method == "brute":
        indices = np.arange(cloud.size, dtype=np.intp)
        keys = norm.comparison_keys(cloud.points, point)
        return _from_keys(point, k, indices, keys, norm)

    tree_distances, _ = cloud.index.query(point, k=[k], p=norm.minkowski_p)
    indices = _candidates(cloud, point, float(tree_distances[0]), norm)
    if indices.shape[0] < k:
        logging.debug("[geometry] Candidate pruning returned %d < k=%d points; using the full scan.", indices.shape[0], k)
        indices = np.arange(cloud.size, dtype=np.intp)
    keys = norm.comparison_keys(cloud.points[indices], point)
    query = _from_keys(point, k, indices, keys, norm)
    logging.debug("[geometry] knn_radius k=%d radius=%.6g in_ball=%d ties=%d",
                  k, query.radius, query.in_ball_count, query.tie_count)
    return query


def ball_indices(cloud: PointCloud, x, tau: float, norm: Norm) -> np.ndarray:
    """Sorted indices of every sample point in the closed ball B(x, tau)."""
    _check_norm(cloud, norm)
    if not np.isfinite(tau) or tau < 0:
        raise InvalidArgumentError(f"Ball radius must be a finite nonnegative number, got {tau}.")
    point = as_point(x, cloud.dimension)
    indices = _candidates(cloud, point, float(tau), norm)
    if indices.shape[0] == 0:
        return indices
    keys = norm.comparison_keys(cloud.points[indices], point)
    return indices[keys <= norm.distance_to_key(float(tau))]
