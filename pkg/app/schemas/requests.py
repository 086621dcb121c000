from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from app.schemas.weight import WeightPayload


class RunRequest(BaseModel):
    weight: WeightPayload = Field(..., description="Peso f = |1 - e^{iθ}|^{2α} c")
    params: Dict[str, Any] = Field(default_factory=dict, description="Parámetros propios del comando")
    seed: Optional[int] = Field(None, ge=0, lt=2 ** 64, description="Semilla; por defecto la de la configuración")

    class Config:
        json_schema_extra = {
            "example": {
                "weight": {"alpha": 0.25, "c": [[1.0, 0.0]]},
                "params": {"interval": [0.5, 3.0], "m_max": 4},
                "seed": 20240601
            }
        }
