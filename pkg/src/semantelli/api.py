"""HTTP JSON API.

Endpoints:

* ``GET /search?q=<text>[&limit=N]`` - run a search, limit applied after ranking
* ``GET /engines`` - engine roster with weights and adapter kinds
* ``PUT /engines/{id}/weight`` with body ``{"weight": x}`` - update and persist
* ``GET /healthz`` - liveness plus enabled-engine count
* ``/ui`` - the bundled single-page interface, when a UI directory is configured

Errors come back as ``{"error": <code>, "detail": <text>}`` with 400/404/503.
The search body is serialized by the same canonical writer the CLI uses,
so the two surfaces are byte-identical apart from timing.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    AllBackendsFailed,
    EmptyQuery,
    NoEnginesEnabled,
    QueryTooLong,
    SemantelliError,
    UnknownEngine,
    WeightOutOfRange,
)
from .pipeline import SearchService, to_json

_STATUS_BY_ERROR: list[tuple[type[SemantelliError], int]] = [
    (EmptyQuery, 400),
    (QueryTooLong, 400),
    (WeightOutOfRange, 400),
    (UnknownEngine, 404),
    (AllBackendsFailed, 503),
    (NoEnginesEnabled, 503),
]


def _status_for(exc: SemantelliError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 500


def create_app(service: SearchService, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="semantelli", docs_url=None, redoc_url=None)

    @app.exception_handler(SemantelliError)
    async def handle_service_error(_request: Request, exc: SemantelliError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "InvalidRequest", "detail": str(exc)},
        )

    @app.get("/search")
    def search(q: str = "", limit: int = 20) -> Response:
        response = service.search(q, limit=limit)
        return Response(content=to_json(response), media_type="application/json")

    @app.get("/engines")
    def engines() -> dict:
        return {"engines": service.engines()}

    @app.put("/engines/{engine_id}/weight")
    def put_weight(engine_id: str, body: dict) -> dict:
        weight = body.get("weight")
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise WeightOutOfRange("body must carry a numeric 'weight'")
        return service.set_weight(engine_id, float(weight))

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "engines": service.enabled_engine_count()}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def index() -> RedirectResponse:
            return RedirectResponse(url="/ui/")

    return app
