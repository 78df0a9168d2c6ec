"""Application factory and the error-to-status mapping.

Every 4xx/5xx body carries a stable machine-readable ``code`` field.
Denied anonymous requests for private entries are answered 404 rather
than 403 so existence cannot be probed; authenticated-but-denied is 403.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import __version__
from ..errors import (
    AccessDenied,
    AttributionCycle,
    AuthRequired,
    BadQuery,
    Conflict,
    CrateBuildError,
    FetchError,
    FlowHubError,
    IntegrityError,
    InvalidCrate,
    InvalidInput,
    InvalidStructure,
    MintFailed,
    NotACrate,
    NotAWorkflow,
    NotFoundError,
    ParseError,
    RefNotFound,
    SchemaError,
    SizeLimit,
    ValidationFailed,
)
from ..registry import Registry
from . import landing, native, trs

STATUS_BY_ERROR: list[tuple[type, int]] = [
    (AuthRequired, 401),
    (AccessDenied, 403),
    (NotFoundError, 404),
    (ValidationFailed, 422),
    (AttributionCycle, 422),
    (RefNotFound, 422),
    (ParseError, 422),
    (SchemaError, 422),
    (NotAWorkflow, 422),
    (NotACrate, 422),
    (InvalidCrate, 422),
    (InvalidStructure, 422),
    (CrateBuildError, 422),
    (BadQuery, 400),
    (InvalidInput, 400),
    (SizeLimit, 413),
    (Conflict, 409),
    (MintFailed, 502),
    (FetchError, 502),
    (IntegrityError, 500),
]


def _status_for(exc: FlowHubError) -> int:
    for cls, status in STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return status
    return 500


def create_app(registry: Registry) -> FastAPI:
    app = FastAPI(title=registry.config.registry_name, version=__version__, docs_url="/docs")
    app.state.registry = registry

    @app.exception_handler(FlowHubError)
    async def flowhub_error(request: Request, exc: FlowHubError):
        body = {"code": exc.code, "message": exc.message}
        if isinstance(exc, ValidationFailed):
            body["errors"] = [vars(f) for f in exc.report.errors]
            body["warnings"] = [vars(f) for f in exc.report.warnings]
        return JSONResponse(status_code=_status_for(exc), content=body)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_body", "message": "request body failed validation",
                     "detail": exc.errors()},
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return JSONResponse(status_code=exc.status_code, content={"code": code, "message": str(exc.detail)})

    app.include_router(native.router)
    app.include_router(trs.router, prefix="/ga4gh/trs/v2")
    app.include_router(landing.router)
    return app
