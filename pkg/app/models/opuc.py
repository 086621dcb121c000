from enum import Enum

import numpy as np
from pydantic import Field, field_validator, model_validator

from app.models.arrays import ArrayModel, readonly
from app.models.weight import WeightSpec


class Normalization(str, Enum):
    MONIC = "monic"          # Φ_N*(z) = Σ x_k/x_0 z^k, Φ_N mónico
    PREDICTOR = "predictor"  # Σ x_k/√x_0 z^k, ortonormal
    RAW = "raw"              # columnas crudas de T_N^{-1} (β̃_u)


class OrthogonalPair(ArrayModel):
    """Φ_N y Φ_N* en la normalización indicada"""
    n: int = Field(..., ge=0)
    normalization: Normalization
    phi_star_coeffs: np.ndarray
    phi_coeffs: np.ndarray
    h: float = Field(..., gt=0)
    verblunsky: np.ndarray
    norms: np.ndarray

    @field_validator("phi_star_coeffs", "phi_coeffs", "verblunsky", mode="before")
    @classmethod
    def freeze_complex(cls, v):
        return readonly(v)

    @field_validator("norms", mode="before")
    @classmethod
    def freeze_real(cls, v):
        return readonly(v, dtype=float)

    @model_validator(mode="after")
    def validate_star_relation(self):
        if self.phi_coeffs.size != self.n + 1 or self.phi_star_coeffs.size != self.n + 1:
            raise ValueError("coefficient arrays must have N+1 entries")
        scale = max(float(np.max(np.abs(self.phi_coeffs))), 1e-300)
        if np.max(np.abs(self.phi_coeffs - np.conj(self.phi_star_coeffs[::-1]))) > 1e-14 * scale:
            raise ValueError("phi_coeffs must be the reversed conjugate of phi_star_coeffs")
        return self

    @property
    def scale(self) -> float:
        """Factor s tal que coeficientes = s · (mónicos)"""
        if self.normalization == Normalization.MONIC:
            return 1.0
        if self.normalization == Normalization.PREDICTOR:
            return 1.0 / np.sqrt(self.h)
        return 1.0 / self.h

    @property
    def monic_phi(self) -> np.ndarray:
        return self.phi_coeffs / self.scale

    @property
    def monic_phi_star(self) -> np.ndarray:
        return self.phi_star_coeffs / self.scale


class CDKernelExact(ArrayModel):
    """Núcleo de Christoffel–Darboux K_N de orden N"""
    n: int = Field(..., ge=1)
    pair: OrthogonalPair
    weight: WeightSpec

    @model_validator(mode="after")
    def validate_degree(self):
        if self.pair.n != self.n:
            raise ValueError("pair degree must equal kernel order N")
        return self
