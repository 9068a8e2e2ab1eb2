"""
API routes for store maps.
"""

from fastapi import APIRouter, HTTPException

from rapsim.core.errors import ConfigurationError
from rapsim.core.world import generate_store_map, render_map
from rapsim.models import MapRequest, MapResponse

router = APIRouter()


@router.post("/generate", response_model=MapResponse)
def generate_map(body: MapRequest):
    """Generate a store map in the plain-text map format."""
    try:
        grid = generate_store_map(body.width, body.height, body.aisle_spacing)
    except ConfigurationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return MapResponse(
        width=grid.width,
        height=grid.height,
        text=render_map(grid),
        free_cells=len(grid.free_cells()),
    )
