import logging

from fastapi import Depends, FastAPI
from opentelemetry.instrumentation.fastapi import FastAPIInstrumentor

from bounds import evaluate_bounds
from constants import APP_NAME, APP_VERSION
from dependencies import get_config, handle_http_exception, validate_auth
from estimators import estimate_at
from geometry import Norm
from measure import SampleSet
from schemas import (
    ERROR_RESPONSES,
    BoundsRequest,
    BoundsResponse,
    EstimateRequest,
    EstimateResponse,
    ModelCatalogResponse,
    ModelSummary,
)
from synthetic import model_catalog
from telemetry import Telemetry

# ----------------------------------------
# Initialization and logging
# ----------------------------------------

cfg = get_config()
Telemetry.configure_basic(cfg)
Telemetry.log_log_level_diagnostics(cfg)
Telemetry.configure_tracing(cfg, APP_NAME)

app = FastAPI(
    title="k-NN measure lab",
    description="k-NN empirical measure estimates and finite-sample bound evaluators",
    version=APP_VERSION,
)


@app.post(
    "/estimate",
    dependencies=[Depends(validate_auth)],
    summary="Estimate a functional of the conditional law at x",
    response_model=EstimateResponse,
    responses=ERROR_RESPONSES,
)
def estimate_endpoint(body: EstimateRequest):
    try:
        sample = SampleSet.from_arrays(body.covariates, body.responses)
        norm = Norm(body.norm, sample.dimension)
        return estimate_at(sample, body.x, body.k, body.functional, body.level, body.sigma2, norm)
    except Exception as e:
        handle_http_exception(e)


@app.post(
    "/bounds",
    dependencies=[Depends(validate_auth)],
    summary="Evaluate every bound formula on one set of constants",
    response_model=BoundsResponse,
    responses=ERROR_RESPONSES,
)
def bounds_endpoint(body: BoundsRequest):
    try:
        return evaluate_bounds(body)
    except Exception as e:
        handle_http_exception(e)


@app.get(
    "/models",
    dependencies=[Depends(validate_auth)],
    summary="List the synthetic models and their constants",
    response_model=ModelCatalogResponse,
)
def models_endpoint(dimension: int = 1):
    try:
        return ModelCatalogResponse(models=[
            ModelSummary(model_id=m.model_id, description=m.description, constants=m.constants())
            for m in model_catalog(dimension)
        ])
    except Exception as e:
        handle_http_exception(e)


FastAPIInstrumentor.instrument_app(app)
logging.debug("[app] %s %s ready", APP_NAME, APP_VERSION)
