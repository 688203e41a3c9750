from fastapi import APIRouter

from actimetry.api.v1 import health, metrics

api_router = APIRouter()
api_router.include_router(health.router, tags=["Health"])
api_router.include_router(metrics.router)
