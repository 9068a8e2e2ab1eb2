"""
API routes for parameter sweeps.
"""

from fastapi import APIRouter, HTTPException
from fastapi.responses import PlainTextResponse

from rapsim.core.config import expand_grid
from rapsim.core.errors import ConfigurationError, GenerationError
from rapsim.core.experiment import run_sweep, sweep_csv
from rapsim.models import SweepReport, SweepRequest

router = APIRouter()


def _sweep(body: SweepRequest) -> SweepReport:
    try:
        points = expand_grid(body.params, body.grid)
        return run_sweep(points, body.repetitions)
    except ConfigurationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except GenerationError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post("", response_model=SweepReport)
def sweep(body: SweepRequest):
    """Run a sweep and return per-scenario rows plus the summary."""
    return _sweep(body)


@router.post("/csv", response_class=PlainTextResponse)
def sweep_as_csv(body: SweepRequest):
    """Run a sweep and return the per-scenario CSV."""
    return PlainTextResponse(sweep_csv(_sweep(body)), media_type="text/csv")
