from fastapi import APIRouter, Depends
from fastapi.responses import ORJSONResponse

from app.core.deps import execute_run, run_config_for
from app.schemas.run_config import Command, RunConfig

router = APIRouter(tags=["Toeplitz"])


@router.post(
    "/columns",
    response_class=ORJSONResponse,
    summary="Columnas de la inversa de Toeplitz",
    description="Primera y última columna de T_N(f)^{-1} por Levinson junto con las predicciones de borde y bulk."
)
async def post_columns(config: RunConfig = Depends(run_config_for(Command.COLUMNS))):
    """
    Columnas de T_N(f)^{-1}:

    - **weight**: α y coeficientes ĉ(k) del factor suave
    - **params.n**: orden N
    - **params.ks**: índices k de los bordes
    - **params.xs**: posiciones x en (0, 1) del bulk
    """
    return await execute_run(config, "calcular las columnas")


@router.post(
    "/phi",
    response_class=ORJSONResponse,
    summary="Polinomios Φ_N y Φ_N*",
    description="Coeficientes en la normalización pedida, coeficientes de Verblunsky y valores en z = 1."
)
async def post_phi(config: RunConfig = Depends(run_config_for(Command.PHI))):
    """
    Polinomios ortogonales:

    - **params.n**: grado N
    - **params.j_max**: derivadas j = 0..j_max en z = 1
    - **params.normalization**: monic, predictor o raw
    """
    return await execute_run(config, "calcular los polinomios")
