import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from geometry import Norm, NormKind, unit_ball_volume


class BoundInputs(BaseModel):
    """
    Constants of the uniform finite-sample error bound.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    d: int = Field(..., ge=1, description="Covariate dimension.")
    n: int = Field(..., ge=1, description="Sample size.")
    k: int = Field(1, ge=1, description="Neighbor count.")
    delta: float = Field(0.05, gt=0.0, lt=1.0, description="Failure probability.")
    v: float = Field(2.0, gt=0.0, description="VC exponent of the function class.")
    A: float = Field(1.0, ge=1.0, description="VC constant of the function class.")
    sigma2_G: float = Field(0.0, ge=0.0, description="Supremum of the conditional variances over the class.")
    L: float = Field(0.0, ge=0.0, description="Uniform Lipschitz constant of z -> mu_z(g).")
    b_X: float = Field(1.0, gt=0.0, description="Lower bound of the covariate density on its support.")
    U_X: float = Field(1.0, gt=0.0, description="Upper bound of the covariate density on its support.")
    c: float = Field(1.0, gt=0.0, le=1.0, description="Support regularity constant.")
    T: float = Field(1.0, gt=0.0, description="Radius cap of the support regularity condition.")
    V_d: Optional[float] = Field(None, gt=0.0, description="Unit ball volume; derived from norm when omitted.")
    norm: NormKind = Field(NormKind.EUCLIDEAN, description="Norm used to derive V_d.")
    K: float = Field(1.0, ge=1.0, description="Stand-in for the universal constant.")
    f_x: Optional[float] = Field(None, gt=0.0, description="Covariate density at the query point.")

    @model_validator(mode="after")
    def check_density_bounds(self):
        if self.b_X > self.U_X:
            raise ValueError(f"b_X={self.b_X} exceeds U_X={self.U_X}")
        return self

    @property
    def volume(self) -> float:
        if self.V_d is not None:
            return self.V_d
        return unit_ball_volume(Norm(self.norm, self.d)).volume

    @property
    def theta(self) -> float:
        return self.d + 1 + self.v

    @property
    def kappa_X(self) -> float:
        return self.U_X / (self.c * self.b_X)

    @property
    def log_factor(self) -> float:
        """log(K A n / delta), grouped so that it depends on A and delta only through A / delta."""
        return math.log(self.K * self.n * (self.A / self.delta))


class AdmissibleWindow(BaseModel):
    """Range of k on which the uniform bound is stated."""
    model_config = ConfigDict(frozen=True)

    k_min: float = Field(..., description="24 d log(24 n / delta).")
    k_max: float = Field(..., description="n min{8 / (sigma2_G kappa_X), T^d b_X c V_d / 2}.")
    radius_k_min: float = Field(..., description="24 d log(12 n / delta), lower end of the radius-bound window.")
    radius_k_max: float = Field(..., description="T^d n b_X c V_d / 2, upper end of the radius-bound window.")

    @property
    def is_empty(self) -> bool:
        return self.k_min > self.k_max

    def contains(self, k: float) -> bool:
        return self.k_min <= k <= self.k_max

    def project(self, k: int) -> int:
        """Nearest integer inside the window; only meaningful for a nonempty window."""
        lo = math.ceil(self.k_min)
        hi = math.floor(self.k_max)
        return int(min(max(k, lo), hi))


class BoundsReport(BaseModel):
    """Every evaluator applied to one set of inputs."""
    inputs: BoundInputs
    V_d: float
    theta: float
    kappa_X: float
    deterministic_radius: Optional[float] = Field(None, description="Only when f_x is given.")
    uniform_radius_bound: float
    window: AdmissibleWindow
    window_is_empty: bool
    k_in_window: bool
    variance_term: float
    bernstein_term: float
    bias_term: float
    uniform_error_bound: float
    local_process_bound: float
