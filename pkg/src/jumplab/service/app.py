"""FastAPI wiring over the handler layer."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from . import handlers
from .schemas import (
    BregmanConstantsRequest,
    BregmanConstantsResponse,
    HealthResponse,
    PFormRequest,
    PFormResponse,
    SimulateRequest,
    SimulateResponse,
    VagueLimitRequest,
    VagueLimitResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="jumplab",
    version=__version__,
    description=(
        "Verification service for pure-jump Dirichlet form identities on"
        " finite state spaces."
    ),
)


@app.exception_handler(handlers.InputError)
async def _input_error(request: Request, exc: handlers.InputError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def get_health() -> HealthResponse:
    return handlers.health()


@app.post("/verify", response_model=VerifyResponse)
def post_verify(req: VerifyRequest) -> VerifyResponse:
    return handlers.run_verify(req)


@app.post("/pform", response_model=PFormResponse)
def post_pform(req: PFormRequest) -> PFormResponse:
    return handlers.run_pform(req)


@app.post("/bregman-constants", response_model=BregmanConstantsResponse)
def post_bregman_constants(req: BregmanConstantsRequest) -> BregmanConstantsResponse:
    return handlers.run_bregman_constants(req)


@app.post("/vague-limit", response_model=VagueLimitResponse)
def post_vague_limit(req: VagueLimitRequest) -> VagueLimitResponse:
    return handlers.run_vague_limit(req)


@app.post("/simulate", response_model=SimulateResponse)
def post_simulate(req: SimulateRequest) -> SimulateResponse:
    return handlers.run_simulate(req)
