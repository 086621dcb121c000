from typing import Callable

from fastapi import HTTPException, status
from fastapi.responses import ORJSONResponse
from pydantic import ValidationError
from starlette.concurrency import run_in_threadpool

from app.config import settings
from app.core.exceptions import OpucFHException
from app.schemas.requests import RunRequest
from app.schemas.run_config import Command, OutputFormat, RunConfig
from app.services.command_service import CommandService
from app.utils.emit import json_ready


def run_config_for(command: Command) -> Callable:
    """
    Dependencia que convierte el cuerpo de la petición en un RunConfig
    validado para el comando de la ruta
    """
    async def build_run_config(request: RunRequest) -> RunConfig:
        try:
            return RunConfig.model_validate({
                "command": command,
                "weight": request.weight.model_dump(),
                "output": {"path": None, "format": OutputFormat.JSON},
                "seed": settings.default_seed if request.seed is None else request.seed,
                "params": request.params,
            })
        except ValidationError as e:
            raise HTTPException(
                status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                detail=f"Parámetros inválidos para {command.value}: {str(e)}"
            )

    return build_run_config


async def execute_run(config: RunConfig, action: str) -> ORJSONResponse:
    """Ejecutar el comando fuera del bucle de eventos y responder con el ResultSet"""
    try:
        result = await run_in_threadpool(CommandService.run, config)
        return ORJSONResponse(content=json_ready(result.model_dump()))
    except (HTTPException, OpucFHException):
        raise
    except Exception as e:
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error al {action}: {str(e)}"
        )
