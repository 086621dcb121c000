from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import ORJSONResponse
from loguru import logger

from app import __version__
from app.config import settings
from app.core.exceptions import OpucFHException
from app.core.logging import setup_logging
from app.routers import main_router


# Lifecycle events
@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup
    setup_logging()
    logger.info(f"{settings.app_name} {__version__} ready")
    yield
    # Shutdown
    logger.info("Shutting down...")


# Create FastAPI app
app = FastAPI(
    title="OPUC Fisher-Hartwig API",
    description="API para polinomios ortogonales en el círculo, núcleos límite y probabilidades de conteo",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    default_response_class=ORJSONResponse,
    lifespan=lifespan
)


# CORS configuration
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Custom exception handler
@app.exception_handler(OpucFHException)
async def opuc_exception_handler(request: Request, exc: OpucFHException):
    logger.warning(f"{exc.error_code} on {request.url.path}: {exc.detail}")
    return ORJSONResponse(
        status_code=exc.status_code,
        content={
            "success": False,
            "error": exc.detail,
            "error_code": exc.error_code,
            "timestamp": exc.timestamp.isoformat(),
            "extra_data": exc.extra_data
        }
    )


# Health check endpoint
@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "service": settings.app_name,
        "version": __version__,
        "limits": {
            "dense_oracle_max_n": settings.dense_oracle_max_n,
            "nystrom_max_nodes": settings.nystrom_max_nodes,
            "dpp_max_n": settings.dpp_max_n,
        }
    }


# Root endpoint
@app.get("/")
async def root():
    return {
        "message": settings.app_name,
        "version": __version__,
        "docs": "/docs",
        "health": "/health"
    }


app.include_router(main_router)


if __name__ == "__main__":
    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.debug,
        log_level=settings.log_level.lower()
    )
