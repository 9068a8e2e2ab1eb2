"""
API routes for generating and running single scenarios.
"""

from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from rapsim.core.config import export_scenario, import_scenario
from rapsim.core.errors import ConfigurationError, GenerationError, PreconditionError
from rapsim.core.experiment import generate_scenario, run_scenario
from rapsim.models import Scenario, ScenarioParams, ScenarioResult

router = APIRouter()


def _generate(params: ScenarioParams) -> Scenario:
    try:
        return generate_scenario(params)
    except (ConfigurationError, PreconditionError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except GenerationError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post("/generate", response_model=Scenario)
def generate(params: ScenarioParams):
    """Generate a scenario without running it."""
    return _generate(params)


@router.post("/run", response_model=ScenarioResult)
def run(params: ScenarioParams):
    """Generate a scenario and run DD, HFI and OPT on every request."""
    return run_scenario(_generate(params))


@router.post("/export")
def export(params: ScenarioParams):
    """Generate a scenario and return it in the versioned export envelope."""
    return export_scenario(_generate(params))


@router.post("/import", response_model=ScenarioResult)
def import_and_run(import_data: Dict[str, Any]):
    """Run a previously exported scenario."""
    try:
        scenario = import_scenario(import_data)
    except ConfigurationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return run_scenario(scenario)
