from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool
import logging

from app.models.request import RunConfig
from app.models.response import SimulationResponse
from app.services.simulation_service import run_simulation

# Configure logging
logger = logging.getLogger(__name__)

# Create router
router = APIRouter()


@router.post("/simulate", response_model=SimulationResponse)
async def simulate_endpoint(request: RunConfig):
    """
    Integrate one trajectory and return its summary and every diagnostics record.

    A run that stops early (positivity loss, slope blow-up, step limit) is
    still a 200: the summary carries the termination reason.
    """
    if request.initial_data:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="initial_data files are not accepted over HTTP; use a preset",
        )

    logger.info(f"Simulation request: model={request.model.value} n={request.n} preset={request.preset}")
    config = request.copy(update={"output": None})
    result = await run_in_threadpool(run_simulation, config)
    return result.to_response()
