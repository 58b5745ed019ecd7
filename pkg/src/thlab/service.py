"""HTTP service exposing the experiment handlers.

Run with ``uvicorn thlab.service:app``.  Domain errors map to HTTP
status codes: bad or unsupported arguments to 400/422, exceeded budgets
to 429.  A failed validation run is still a 200: the outcome is data,
not a transport error.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .errors import (
    InvalidArgumentError,
    MissingSupportError,
    NumericInputError,
    ResourceLimitError,
    UnsupportedTheoryError,
)
from .experiments import (
    run_cardinality,
    run_convergence,
    run_moments,
    run_simulate,
    run_validate,
)
from .schemas import (
    CardinalityRequest,
    CardinalityResponse,
    ConvergenceRequest,
    ConvergenceResponse,
    HealthResponse,
    MomentsRequest,
    MomentsResponse,
    SimulateRequest,
    SimulateResponse,
    ValidateRequest,
    ValidateResponse,
)

app = FastAPI(title="thlab", version=__version__)

_STATUS = {
    InvalidArgumentError: 400,
    MissingSupportError: 400,
    NumericInputError: 400,
    UnsupportedTheoryError: 422,
    ResourceLimitError: 429,
}


def _register_handler(exc_type, status: int) -> None:
    @app.exception_handler(exc_type)
    async def handler(request: Request, exc: Exception, _status=status):
        return JSONResponse(
            status_code=_status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )


for _exc, _code in _STATUS.items():
    _register_handler(_exc, _code)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok")


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    return run_simulate(req)


@app.post("/moments", response_model=MomentsResponse)
def moments(req: MomentsRequest) -> MomentsResponse:
    return run_moments(req)


@app.post("/cardinality", response_model=CardinalityResponse)
def cardinality(req: CardinalityRequest) -> CardinalityResponse:
    return run_cardinality(req)


@app.post("/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest) -> ValidateResponse:
    return run_validate(req)


@app.post("/convergence", response_model=ConvergenceResponse)
def convergence(req: ConvergenceRequest) -> ConvergenceResponse:
    return run_convergence(req)
