from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from app.models.arrays import ArrayModel


class DiscretizedOperator(ArrayModel):
    """Discretización de Nyström de un núcleo sobre un intervalo"""
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    eigenvalues: np.ndarray
    interval: Tuple[float, float]
    hermitian: bool = True
    extrapolated: bool = Field(False, description="Intervalo que cruza u = 0, partido en dos bloques")

    @model_validator(mode="after")
    def validate_shapes(self):
        size = self.nodes.size
        if self.weights.shape != (size,) or self.matrix.shape != (size, size):
            raise ValueError("nodes, weights and matrix sizes disagree")
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")
        return self

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix))) if self.size else 0.0


class CountingProbability(ArrayModel):
    """P(F[I] = m) a partir de det(Id - γK)"""
    interval: Tuple[float, float]
    m: int = Field(..., ge=0)
    value: float = Field(..., ge=-1e-6, le=1.0 + 1e-6)
    regularized: bool = False

    @field_validator("interval")
    @classmethod
    def validate_interval(cls, v):
        if v[0] > v[1]:
            raise ValueError("interval must satisfy u <= v")
        return v


class ShrinkingScalingReport(ArrayModel):
    """Decaimiento de las probabilidades de conteo en intervalos contraídos por N^{1-p}"""
    alpha: float
    p: int = Field(..., ge=2)
    m: int = Field(..., ge=1)
    base_interval: Tuple[float, float]
    n_values: List[int]
    probabilities: List[float]
    slope: float
    intercept: float
    r_value: float
    predicted_slope: float = Field(..., description="(1-p)(m(1+2α) + m(m-1))")
    bound_slope: float = Field(..., description="Cota (1-p) del enunciado")
    zero_count_probabilities: Optional[List[float]] = None
