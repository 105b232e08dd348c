from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from bounds import BoundInputs, BoundsReport
from estimators import EstimateResult
from geometry import NormKind

# ----------------------------------------
# Request/Response schemas for the HTTP service
# ----------------------------------------


class EstimateRequest(BaseModel):
    """Inline sample plus one query, for POST /estimate."""
    model_config = ConfigDict(extra="forbid")

    covariates: List[List[float]] = Field(
        ...,
        description="n x d covariates",
        examples=[[[0.0], [1.0], [2.0]]],
    )
    responses: List[float] = Field(
        ...,
        description="n scalar responses",
        examples=[[10.0, 20.0, 30.0]],
    )
    x: List[float] = Field(..., description="Query point", examples=[[0.0]])
    k: int = Field(..., ge=1, description="Neighbor count", examples=[2])
    functional: str = Field(
        "mean",
        description="mean | square | const:c | cdf:t | quantile:u | loclin",
        examples=["mean"],
    )
    level: Optional[float] = Field(None, gt=0.0, lt=1.0, description="Confidence level of the plug-in interval")
    sigma2: Optional[float] = Field(None, ge=0.0, description="Residual variance for loclin")
    norm: NormKind = Field(NormKind.EUCLIDEAN, description="Ball norm")


class BoundsRequest(BoundInputs):
    """BoundInputs for POST /bounds."""


class ModelSummary(BaseModel):
    model_id: str
    description: str
    constants: Dict[str, Any]


class ModelCatalogResponse(BaseModel):
    models: List[ModelSummary] = Field(default_factory=list)


EstimateResponse = EstimateResult
BoundsResponse = BoundsReport

ERROR_RESPONSES = {
    400: {
        "description": "Invalid input",
        "content": {"application/json": {"example": {"detail": "k must be an integer in [1, 3], got 5."}}},
    },
    401: {
        "description": "Missing or invalid X-API-KEY",
        "content": {"application/json": {"example": {"detail": "Invalid API key"}}},
    },
    422: {
        "description": "Numeric failure or unsupported request",
        "content": {"application/json": {"example": {"detail": "Functional identity is not finite at sample 4."}}},
    },
}
