from contextlib import asynccontextmanager

import structlog
from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse

from actimetry import __version__
from actimetry.api.v1 import api_router
from actimetry.api.v1.health import router as health_router
from actimetry.config import settings
from actimetry.core.exceptions import ActimetryError, UploadTooLargeError
from actimetry.core.logging import configure_logging

logger = structlog.get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(app.debug, settings.LOG_LEVEL)
    logger.info("service_started", environment=settings.ENVIRONMENT, max_upload_rows=settings.MAX_UPLOAD_ROWS)
    yield


async def upload_too_large_handler(request: Request, exc: UploadTooLargeError) -> JSONResponse:
    return JSONResponse(status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE, content={"detail": str(exc)})


async def analysis_error_handler(request: Request, exc: ActimetryError) -> JSONResponse:
    logger.info("request_rejected", path=request.url.path, error_type=type(exc).__name__, error=str(exc))
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": str(exc), "error_type": type(exc).__name__},
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title=f"{settings.APP_NAME} API",
        description="Circadian and fractal activity statistics for wrist accelerometry.",
        version=__version__,
        debug=settings.DEBUG,
        lifespan=lifespan,
    )
    app.add_exception_handler(UploadTooLargeError, upload_too_large_handler)
    app.add_exception_handler(ActimetryError, analysis_error_handler)

    app.include_router(health_router, tags=["Health"])
    app.include_router(api_router, prefix="/api/v1")

    return app


app = create_app()
