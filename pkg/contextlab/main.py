"""
ContextLab Main Application

FastAPI service exposing the deciders, consistification and the number lab.
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from . import __version__
from .config import LOG_FORMAT, THEORIES, settings
from .routes import decide, numlab

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper()),
    format=LOG_FORMAT,
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Log startup and shutdown; the service keeps no state between requests."""
    logger.info("ContextLab starting up...")
    logger.info(
        f"Limits: {settings.MAX_LP_VARS} LP variables, {settings.MAX_INCIDENCES} incidences, "
        f"theories: {', '.join(THEORIES)}"
    )
    yield
    logger.info("ContextLab shutdown complete")


# Create FastAPI app
app = FastAPI(
    title="ContextLab",
    description="Exact KS and CbD 2.0 contextuality deciders with consistification",
    version=__version__,
    lifespan=lifespan,
)

# Include routers
app.include_router(decide.router)
app.include_router(numlab.router)


@app.get("/health")
async def health_check():
    """Liveness check used by the compose healthcheck."""
    return {"status": "healthy", "version": __version__}
