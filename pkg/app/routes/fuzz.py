from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool
import logging

from app.models.request import FuzzConfig
from app.models.response import FuzzResponse
from app.services.fuzz_service import run_fuzz

# Configure logging
logger = logging.getLogger(__name__)

# Create router
router = APIRouter()


@router.post("/fuzz", response_model=FuzzResponse)
async def fuzz_endpoint(request: FuzzConfig):
    """Evaluate both inequalities on ``trials`` random densities; report path is ignored."""
    logger.info(f"Fuzz request: trials={request.trials} seed0={request.seed0} n={request.n}")
    config = request.copy(update={"report": None})
    return await run_in_threadpool(run_fuzz, config)
