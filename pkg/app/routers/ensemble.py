from fastapi import APIRouter, Depends
from fastapi.responses import ORJSONResponse

from app.core.deps import execute_run, run_config_for
from app.schemas.run_config import Command, RunConfig

router = APIRouter(tags=["Ensemble"])


@router.post(
    "/sample",
    response_class=ORJSONResponse,
    summary="Muestrear el ensemble",
    description="Histograma de conteos por MCMC o DPP sobre malla, con errores estándar y diagnósticos."
)
async def post_sample(config: RunConfig = Depends(run_config_for(Command.SAMPLE))):
    """
    Muestreo Monte Carlo:

    - **params.n**: tamaño N del ensemble
    - **params.samples**: número de extracciones
    - **params.method**: mcmc o dpp
    - **params.interval / scale**: intervalo [u/N^q, v/N^q]
    """
    return await execute_run(config, "muestrear el ensemble")
