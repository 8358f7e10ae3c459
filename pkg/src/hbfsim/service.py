"""HTTP service wrapping the experiment runner.

Run it with ``hbfsim serve`` or any ASGI server pointing at
``hbfsim.service:app``. The CLI talks to this app in-process by default.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import __version__
from .exceptions import HbfsimError, UnknownPresetError
from .harness import (
    ExperimentConfig,
    PRESET_NAMES,
    SweepResult,
    preset,
    run_experiment,
    to_csv,
)


class HealthResponse(BaseModel):
    status: str
    version: str


class PresetListResponse(BaseModel):
    presets: list[str]


class RunRequest(BaseModel):
    config: ExperimentConfig
    workers: Optional[int] = Field(default=None, ge=1)
    include_per_trial: bool = False


def create_app() -> FastAPI:
    app = FastAPI(title="hbfsim", version=__version__)

    @app.exception_handler(UnknownPresetError)
    async def _unknown_preset(request: Request, exc: UnknownPresetError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(HbfsimError)
    async def _invalid(request: Request, exc: HbfsimError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/presets", response_model=PresetListResponse)
    def preset_list():
        return PresetListResponse(presets=list(PRESET_NAMES))

    @app.get("/presets/{name}", response_model=ExperimentConfig)
    def preset_detail(name: str, scale: float = Query(default=0.25, gt=0.0, le=1.0)):
        return preset(name, scale)

    @app.post("/experiments/run", response_model=SweepResult)
    def experiments_run(req: RunRequest):
        return run_experiment(
            req.config, workers=req.workers, keep_per_trial=req.include_per_trial
        )

    @app.post("/experiments/run.csv")
    def experiments_run_csv(req: RunRequest):
        result = run_experiment(req.config, workers=req.workers)
        return PlainTextResponse(to_csv(result), media_type="text/csv")

    return app


app = create_app()
