from fastapi import APIRouter, Depends
from fastapi.responses import ORJSONResponse

from app.core.deps import execute_run, run_config_for
from app.schemas.run_config import Command, RunConfig

router = APIRouter(tags=["Theorems"])


@router.post(
    "/verify-theorems",
    response_class=ORJSONResponse,
    summary="Verificar las asintóticas",
    description="Tablas exacto frente a asintótico para columnas, Φ_N en z = 1, núcleo límite y decaimiento."
)
async def post_verify_theorems(config: RunConfig = Depends(run_config_for(Command.VERIFY_THEOREMS))):
    """
    Barrido de verificación:

    - **params.n_values**: tamaños N (al menos dos)
    - **params.ks / xs / js**: índices de borde, posiciones de bulk y derivadas
    - **params.kernel_pairs**: pares (u, v) del núcleo límite
    """
    return await execute_run(config, "verificar los teoremas")


@router.post(
    "/appendix",
    response_class=ORJSONResponse,
    summary="Tablas del apéndice",
    description="Φ_N(1) exacto frente a A N^α para N entre 400 y 640."
)
async def post_appendix(config: RunConfig = Depends(run_config_for(Command.APPENDIX))):
    """
    Tablas Φ_N(1):

    - **params.alphas**: exponentes; por defecto α = -d para los d del apéndice
    - **params.n_min / n_max / step**: barrido en N
    """
    return await execute_run(config, "generar las tablas")
