from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, computed_field


@dataclass(frozen=True, eq=False)
class LocalLinearFit:
    """
    Local-linear fit under the k-NN measure.

    Attributes:
        alpha: intercept, the estimate of the regression at x.
        beta: slope d-vector.
        gram: G_x, the (d+1) x (d+1) matrix mu{a a^T} with a = (1, (X - x)^T)^T.
        gram_pseudo_inverse: G_x^+.
        variance_scale: sigma^2(x) used for the plug-in variance.
        k: neighbor count.
        in_ball_count: number of points carrying mass.
        rank: numerical rank of G_x.
        intercept_only: true for the degree-0 fit with beta forced to zero.
    """
    alpha: float
    beta: np.ndarray
    gram: np.ndarray
    gram_pseudo_inverse: np.ndarray
    variance_scale: float
    k: int
    in_ball_count: int
    rank: int
    intercept_only: bool = False

    @property
    def rank_deficient(self) -> bool:
        if self.intercept_only:
            return self.rank < 1
        return self.rank < self.gram.shape[0]

    @property
    def variance(self) -> np.ndarray:
        """sigma^2(x) G_x^+, the limiting covariance of sqrt(k) (alpha, beta)."""
        return self.variance_scale * self.gram_pseudo_inverse


class ConfidenceInterval(BaseModel):
    center: float = Field(..., description="Point estimate.")
    half_width: float = Field(..., ge=0.0, description="Half width of the interval.")
    level: float = Field(..., gt=0.0, lt=1.0, description="Nominal coverage.")
    variance_clamped: bool = Field(False, description="True when a negative variance estimate was clamped to zero.")

    @computed_field
    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @computed_field
    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def contains(self, value: float) -> bool:
        """Closed interval membership with a 1e-12 relative slack."""
        slack = 1e-12 * max(abs(self.center), abs(value), 1.0)
        return self.lower - slack <= value <= self.upper + slack


class EstimateResult(BaseModel):
    """One point estimate at a query point, as returned by the CLI and the service."""
    functional: str = Field(..., description="Functional token that was evaluated.")
    x: List[float] = Field(..., description="Query point.")
    n: int = Field(..., description="Sample size.")
    k: int = Field(..., description="Neighbor count.")
    value: float = Field(..., description="Estimate: mu_hat(g), F_hat(t|x), a quantile or the local-linear intercept.")
    radius: float = Field(..., description="k-NN radius at x.")
    in_ball_count: int = Field(..., description="Points in the closed k-NN ball.")
    tie_count: int = Field(..., description="Points exactly on the ball boundary.")
    interval: Optional[ConfidenceInterval] = Field(None, description="Plug-in confidence interval when a level was given.")
    beta: Optional[List[float]] = Field(None, description="Local-linear slope.")
    rank_deficient: Optional[bool] = Field(None, description="Local-linear Gram matrix is singular.")
