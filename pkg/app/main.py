"""
FastAPI Application

HTTP surface of the solver: simulation, inequality fuzzing and the preset
catalog, plus health and error handling.
"""

from fastapi import FastAPI, Request, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
import logging
import os
from dotenv import load_dotenv

from app import __version__
from app.errors import SolverError
from app.models.response import ErrorResponse, HealthResponse

# Import routes
from app.routes.simulate import router as simulate_router
from app.routes.fuzz import router as fuzz_router
from app.routes.presets import router as presets_router

# Load environment variables from .env file
load_dotenv()

# Configure logging
logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Create FastAPI instance
app = FastAPI(
    title="Arctan Diffusion Solver",
    description="Pseudo-spectral solver and verifier for arctan-fast diffusion on the circle",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(simulate_router, prefix="/api/v1", tags=["Simulation"])
app.include_router(fuzz_router, prefix="/api/v1", tags=["Fuzz"])
app.include_router(presets_router, prefix="/api/v1", tags=["Presets"])


@app.on_event("startup")
async def startup_event():
    logger.info(f"🚀 Arctan diffusion solver {__version__} starting")


# -------------------------
# Health Check
# -------------------------
@app.get("/health", response_model=HealthResponse)
@app.head("/health")
async def health_check():
    """Health check endpoint for monitoring and load balancers."""
    return HealthResponse(
        status="healthy",
        message="Arctan diffusion solver is running",
        version=__version__,
    )


# -------------------------
# Exception Handlers
# -------------------------
def _error(status_code: int, message: str, reason: str = None, **extra) -> JSONResponse:
    content = ErrorResponse(message=message, reason=reason, status_code=status_code).dict()
    content.update(extra)
    return JSONResponse(status_code=status_code, content=content)


@app.exception_handler(SolverError)
async def solver_exception_handler(request: Request, exc: SolverError):
    logger.error(f"❌ Solver error ({exc.reason}): {exc.message}")
    return _error(422, exc.message, exc.reason, details=exc.details)


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    logger.error(f"HTTP error {exc.status_code}: {exc.detail}")
    return _error(exc.status_code, exc.detail)


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.error(f"Validation error: {exc.errors()}")
    return _error(422, "Validation error", "validation_error", details=exc.errors())


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Unexpected error: {str(exc)}")
    return _error(500, "Internal server error")


# -------------------------
# Root Endpoint
# -------------------------
@app.get("/")
async def root():
    return {
        "message": "Arctan Diffusion Solver API",
        "version": __version__,
        "docs_url": "/docs",
        "health_check": "/health",
        "endpoints": {
            "simulate": "/api/v1/simulate",
            "fuzz": "/api/v1/fuzz",
            "presets": "/api/v1/presets",
        },
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host=os.getenv("API_HOST", "0.0.0.0"),
        port=int(os.getenv("API_PORT", "8000")),
    )
