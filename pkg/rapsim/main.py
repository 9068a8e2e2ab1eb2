"""
rapsim - HTTP service for scenario runs, sweeps and store maps.
"""

import logging
import os
from contextlib import asynccontextmanager

from fastapi import FastAPI

from rapsim.api import maps, scenarios, sweeps

logger = logging.getLogger("rapsim")


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Honour RAPSIM_LOG_LEVEL for the simulator loggers while serving."""
    logger.setLevel(os.environ.get("RAPSIM_LOG_LEVEL", "WARNING").upper())
    logger.info("rapsim API ready")
    yield


app = FastAPI(
    title="rapsim",
    description="Compare flooding, history-based incentive routing and optimal allocation",
    version="1.0.0",
    lifespan=lifespan,
)

app.include_router(scenarios.router, prefix="/api/scenarios", tags=["scenarios"])
app.include_router(sweeps.router, prefix="/api/sweeps", tags=["sweeps"])
app.include_router(maps.router, prefix="/api/maps", tags=["maps"])


@app.get("/health")
async def health_check():
    return {"status": "healthy"}


def run():
    """Serve the API with uvicorn; PORT picks the port, DEV=true enables reload."""
    import uvicorn
    uvicorn.run(
        "rapsim.main:app",
        host="0.0.0.0",
        port=int(os.environ.get("PORT", 8080)),
        reload=os.environ.get("DEV", "").lower() == "true",
    )


if __name__ == "__main__":
    run()
