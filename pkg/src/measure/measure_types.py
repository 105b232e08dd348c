from dataclasses import dataclass
from typing import Optional

import numpy as np

from geometry import NeighborQuery, PointCloud
from util.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    The i.i.d. sample (X_i, Y_i).

    Responses are either an n-vector (scalar responses) or an n x m array
    (fixed-length response vectors).
    """
    covariates: PointCloud
    responses: np.ndarray

    def __post_init__(self):
        responses = np.ascontiguousarray(np.asarray(self.responses, dtype=float))
        if responses.ndim not in (1, 2):
            raise InvalidArgumentError("Responses must be an n-vector or an n x m array.")
        if responses.shape[0] != self.covariates.size:
            raise InvalidArgumentError(
                f"Sample has {self.covariates.size} covariates but {responses.shape[0]} responses."
            )
        responses.setflags(write=False)
        object.__setattr__(self, "responses", responses)

    @classmethod
    def from_arrays(cls, covariates, responses) -> "SampleSet":
        return cls(covariates=PointCloud(covariates), responses=responses)

    @property
    def size(self) -> int:
        return self.covariates.size

    @property
    def dimension(self) -> int:
        return self.covariates.dimension

    @property
    def is_scalar(self) -> bool:
        return self.responses.ndim == 1

    @property
    def response_dimension(self) -> Optional[int]:
        return None if self.is_scalar else int(self.responses.shape[1])


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """
    A measure putting equal mass 1/denominator on each sample point in a ball.

    Attributes:
        source: the sample.
        x: the query point.
        in_ball: sorted sample indices carrying mass.
        denominator: k for the k-NN measure, the in-ball count for Nadaraya-Watson.
    """
    source: SampleSet
    x: np.ndarray
    in_ball: np.ndarray
    denominator: int

    @property
    def mass_per_point(self) -> float:
        return 1.0 / self.denominator

    @property
    def in_ball_count(self) -> int:
        return int(self.in_ball.shape[0])

    @property
    def total_mass(self) -> float:
        return self.in_ball_count / self.denominator

    @property
    def weights(self) -> np.ndarray:
        """Dense n-vector of weights."""
        w = np.zeros(self.source.size)
        w[self.in_ball] = self.mass_per_point
        return w

    @property
    def in_ball_responses(self) -> np.ndarray:
        return self.source.responses[self.in_ball]

    @property
    def in_ball_covariates(self) -> np.ndarray:
        return self.source.covariates.points[self.in_ball]


@dataclass(frozen=True, eq=False)
class KnnMeasure(EmpiricalMeasure):
    """k-NN empirical measure: weight 1/k on each point of the closed k-NN ball."""
    k: int = 1
    query: NeighborQuery = None

    @property
    def radius(self) -> float:
        return self.query.radius


@dataclass(frozen=True, eq=False)
class NwMeasure(EmpiricalMeasure):
    """Nadaraya-Watson measure with an indicator kernel of fixed bandwidth."""
    bandwidth: float = 0.0
