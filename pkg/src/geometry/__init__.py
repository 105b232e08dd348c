from .geometry_types import BallVolume, NeighborQuery, Norm, NormKind, PointCloud
from .neighbors import ball_indices, knn_radius, unit_ball_volume
