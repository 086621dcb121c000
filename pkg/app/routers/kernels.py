from fastapi import APIRouter, Depends
from fastapi.responses import ORJSONResponse

from app.core.deps import execute_run, run_config_for
from app.schemas.run_config import Command, RunConfig

router = APIRouter(tags=["Kernels"])


@router.post(
    "/kernel",
    response_class=ORJSONResponse,
    summary="Núcleo límite",
    description="K(u, v) sobre una malla y comparación de la diagonal analítica con las diagonales impresas."
)
async def post_kernel(config: RunConfig = Depends(run_config_for(Command.KERNEL))):
    """
    Núcleo límite:

    - **params.u_min / u_max / points**: malla en u (sin u = 0)
    - **params.gauge**: proof o theorem
    - **params.apply_c_factor**: dividir por c(1)
    """
    return await execute_run(config, "evaluar el núcleo")


@router.post(
    "/gap",
    response_class=ORJSONResponse,
    summary="Probabilidades de conteo",
    description="P(F[I] = m) a partir de det(Id - γK) discretizado por Nyström."
)
async def post_gap(config: RunConfig = Depends(run_config_for(Command.GAP))):
    """
    Probabilidades de huecos:

    - **params.interval**: intervalo [u, v]
    - **params.m_max**: conteo máximo (<= 12)
    - **params.nodes**: nodos de Gauss–Legendre
    """
    return await execute_run(config, "calcular las probabilidades")
