"""
principal module for routers
this module imports all the routers and initializes them
"""
from fastapi import APIRouter

from .ensemble import router as ensemble_router
from .kernels import router as kernels_router
from .theorems import router as theorems_router
from .toeplitz import router as toeplitz_router

main_router = APIRouter(prefix="/api/v1")

main_router.include_router(toeplitz_router)
main_router.include_router(theorems_router)
main_router.include_router(kernels_router)
main_router.include_router(ensemble_router)

__all__ = [
    "main_router",
]

#metada for the module
__version__ = "1.0.0"
__description__ = "Main router for the application, includes all sub-routers."
