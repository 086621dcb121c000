from pathlib import Path
from typing import List, Optional, Tuple

import orjson
from pydantic import BaseModel, Field, field_validator

from app.core.exceptions import InvalidWeightException
from app.models.weight import WeightSpec


class WeightPayload(BaseModel):
    alpha: float = Field(..., gt=-0.5, lt=0.5, description="Exponente Fisher–Hartwig")
    c: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(1.0, 0.0)],
        description="ĉ(k) para k = 0..M como pares [re, im]; c ≡ 1 por defecto",
    )
    beurling_mu: Optional[float] = Field(None, ge=0, description="Exponente μ de la clase de Beurling")

    @field_validator("c")
    @classmethod
    def validate_c(cls, v):
        if not v:
            raise ValueError("c must contain at least c(0)")
        return v

    class Config:
        json_schema_extra = {
            "example": {
                "alpha": 0.25,
                "c": [[1.09, 0.0], [0.3, 0.0]],
                "beurling_mu": 1.0
            }
        }

    def to_weight(self) -> WeightSpec:
        """WeightSpec validado (hermiticidad y positividad de c)"""
        return WeightSpec.from_one_sided(
            self.alpha, [complex(re, im) for re, im in self.c], self.beurling_mu
        )

    @classmethod
    def from_file(cls, path: str, alpha: Optional[float] = None) -> "WeightPayload":
        """Leer un c-file JSON; --alpha tiene prioridad sobre el del fichero"""
        try:
            data = orjson.loads(Path(path).read_bytes())
        except (OSError, orjson.JSONDecodeError) as e:
            raise InvalidWeightException(f"Cannot read c-file {path}: {e}")
        if not isinstance(data, dict):
            raise InvalidWeightException(f"c-file {path} must hold a JSON object")
        if alpha is not None:
            data["alpha"] = alpha
        return cls.model_validate(data)
