from enum import Enum
from typing import Optional

from pydantic import Field

from app.models.arrays import ArrayModel


class Regime(str, Enum):
    EDGE_LOW_K = "edge_low_k"
    EDGE_HIGH_K = "edge_high_k"
    BULK = "bulk"
    AT_ONE = "at_one"
    DERIVATIVE_AT_ONE = "derivative_at_one"


class AsymptoticPrediction(ArrayModel):
    """Término principal de una fórmula asintótica"""
    value: complex
    order_exponent: Optional[float] = Field(None, description="Exponente de N en el resto, si se enuncia")
    regime: Regime
    n: int = Field(..., ge=1)
    index: float = Field(..., description="k, x o j según el régimen")
    integral_form: Optional[float] = Field(None, description="Constante en forma integral")
    gamma_form: Optional[float] = Field(None, description="Constante en forma Gamma")

    @property
    def form_difference(self) -> Optional[float]:
        if self.integral_form is None or self.gamma_form is None:
            return None
        return abs(self.integral_form - self.gamma_form)
