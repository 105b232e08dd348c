from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from constants import SCHEMA_VERSION
from geometry import NormKind

from .experiment_kinds import ExperimentKind

RECORD_COLUMNS = ["replication", "n", "k", "point", "functional", "metric", "param", "value"]

# Point id of a value that is a supremum over the x-lattice.
SUP_POINT = -1


class FixedK(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rule: Literal["fixed"] = "fixed"
    k: int = Field(..., ge=1)


class PowerK(BaseModel):
    """k = ceil(n^a)."""
    model_config = ConfigDict(extra="forbid")
    rule: Literal["power"] = "power"
    a: float = Field(..., gt=0.0, le=1.0)


class WindowK(BaseModel):
    """k = ceil(n^(2/(d+2))) projected into the admissible window."""
    model_config = ConfigDict(extra="forbid")
    rule: Literal["theorem_window"] = "theorem_window"


KRule = Annotated[Union[FixedK, PowerK, WindowK], Field(discriminator="rule")]


def _default_K_grid() -> List[float]:
    return [1.0 + 0.5 * i for i in range(39)]


class ExperimentSpec(BaseModel):
    """
    One Monte Carlo experiment. Spec files are JSON objects with these fields;
    unknown fields are rejected.
    """
    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind = Field(..., description="Which experiment to run.")
    model: str = Field("M1", description="Synthetic model id.")
    dimension: int = Field(1, ge=1, le=5, description="Covariate dimension.")
    norm: NormKind = Field(NormKind.EUCLIDEAN, description="Norm of the neighbor balls.")
    n_grid: List[int] = Field(..., min_length=1, description="Sample sizes, strictly increasing.")
    k_rule: KRule = Field(default_factory=lambda: PowerK(a=0.6), description="How k follows n.")
    replications: int = Field(..., ge=1, description="Number of Monte Carlo replications R.")
    delta: float = Field(0.05, gt=0.0, lt=1.0, description="Failure probability of the bounds.")
    level: float = Field(0.95, gt=0.0, lt=1.0, description="Nominal confidence level.")
    query_points: Optional[List[List[float]]] = Field(None, description="Query points; model default when omitted.")
    functionals: List[str] = Field(default_factory=lambda: ["identity"], min_length=1,
                                   description="Functional tokens, or 'cdf' for the indicator class.")
    output: Optional[str] = Field(None, description="Output directory.")
    seed: int = Field(0, ge=0, description="Master seed.")
    workers: int = Field(1, ge=1, description="Parallel workers; never changes the results.")
    x_grid_size: int = Field(101, ge=2, description="Lattice points per axis for suprema over x.")
    interior_only: bool = Field(False, description="Shrink the lattice inward by the uniform radius bound.")
    eta: float = Field(0.1, gt=0.0, description="Radius inflation of the bias check.")
    eta_grid: Optional[List[float]] = Field(None, description="Several inflations for the bias check.")
    k_grid: Optional[List[int]] = Field(None, description="k-sweep for the bound experiment.")
    K: float = Field(1.0, ge=1.0, description="Constant multiplying the uniform bound.")
    vc_v: float = Field(2.0, gt=0.0, description="VC exponent of the function class.")
    vc_A: float = Field(1.0, ge=1.0, description="VC constant of the function class.")
    K_grid: List[float] = Field(default_factory=_default_K_grid, min_length=1, description="Calibration grid for K.")
    ball_count: int = Field(1000, ge=1, description="Balls per replication in the concentration check.")
    modulus_grid: int = Field(201, ge=2, description="Grid size of the modulus of continuity.")
    sigma2: Optional[float] = Field(None, ge=0.0, description="Residual variance for the local-linear check; model value when omitted.")

    @field_validator("n_grid")
    @classmethod
    def check_n_grid(cls, value: List[int]) -> List[int]:
        if any(n < 1 for n in value):
            raise ValueError("every n must be >= 1")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return value

    @field_validator("K_grid", "eta_grid")
    @classmethod
    def check_sorted(cls, value):
        if value is not None and any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("grid must be strictly increasing")
        return value

    @model_validator(mode="after")
    def check_k_rule(self):
        if isinstance(self.k_rule, FixedK) and self.k_rule.k > self.n_grid[0]:
            raise ValueError(f"fixed k={self.k_rule.k} exceeds the smallest n={self.n_grid[0]}")
        if self.k_grid is not None and max(self.k_grid) > self.n_grid[0]:
            raise ValueError("k_grid entries must not exceed the smallest n")
        if self.query_points is not None:
            for point in self.query_points:
                if len(point) != self.dimension:
                    raise ValueError(f"query point {point} does not have dimension {self.dimension}")
        return self

    def echo(self) -> Dict[str, Any]:
        """The spec as written to result files; run-local fields are left out."""
        return self.model_dump(mode="json", exclude={"workers", "output"})


class ReplicationRecord(BaseModel):
    """One long-format row: a metric value from one replication."""
    model_config = ConfigDict(frozen=True)

    replication: int
    n: int
    k: int
    point: int = Field(..., description=f"Query point index, {SUP_POINT} for a supremum over the lattice.")
    functional: str
    metric: str
    param: float = 0.0
    value: float

    def as_row(self) -> list:
        return [self.replication, self.n, self.k, self.point, self.functional, self.metric, self.param, self.value]


class ExperimentResult(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: ExperimentKind
    status: Literal["ok", "skipped"] = "ok"
    spec: Dict[str, Any]
    constants: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    aggregates: Dict[str, Optional[float]] = Field(default_factory=dict)
    records: List[ReplicationRecord] = Field(default_factory=list)


class Calibration(BaseModel):
    schema_version: str = SCHEMA_VERSION
    spec: Dict[str, Any]
    chosen_K: Optional[float] = Field(None, description="Smallest K on the grid meeting the target, None when none does.")
    violation_frequency: Optional[float] = Field(None, description="Violation frequency at the chosen K.")
    target: float
    grid: List[float]
    frequencies: List[float] = Field(default_factory=list, description="Violation frequency at each grid value.")
