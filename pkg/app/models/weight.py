from typing import Optional

import numpy as np
from pydantic import Field, field_validator, model_validator

from app.config import settings
from app.core.exceptions import InvalidWeightException, WeightNotPositiveException
from app.models.arrays import ArrayModel, readonly

HERMITIAN_TOL = 1e-13


class WeightSpec(ArrayModel):
    """
    Símbolo f(e^{iθ}) = |1 - e^{iθ}|^{2α} c(e^{iθ}).

    c_fourier guarda ĉ(-M..M); la posición k + M corresponde a ĉ(k).
    """
    alpha: float = Field(..., description="Exponente Fisher–Hartwig, |α| < 1/2")
    c_fourier: np.ndarray = Field(..., description="Coeficientes de Fourier bilaterales de c")
    beurling_mu: Optional[float] = Field(None, ge=0, description="Exponente del peso de Beurling (solo informativo)")

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v):
        if not np.isfinite(v) or abs(v) >= 0.5:
            raise InvalidWeightException(f"alpha={v} outside (-1/2, 1/2)")
        return float(v)

    @field_validator("c_fourier", mode="before")
    @classmethod
    def validate_c_fourier(cls, v):
        """Comprobar longitud impar y simetría hermítica"""
        coeffs = np.atleast_1d(np.asarray(v, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise InvalidWeightException("c_fourier must have odd length 2M+1")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidWeightException("c_fourier contains non-finite values")
        scale = max(float(np.max(np.abs(coeffs))), 1.0)
        if np.max(np.abs(coeffs - np.conj(coeffs[::-1]))) > HERMITIAN_TOL * scale:
            raise InvalidWeightException("c_fourier is not Hermitian: c(-k) must equal conj(c(k))")
        # simetrizar exactamente
        coeffs = 0.5 * (coeffs + np.conj(coeffs[::-1]))
        return readonly(coeffs)

    @model_validator(mode="after")
    def validate_positive(self):
        theta, values = self.c_on_grid(settings.positivity_grid)
        idx = int(np.argmin(values))
        if values[idx] <= 0.0:
            raise WeightNotPositiveException(float(values[idx]), float(theta[idx]))
        return self

    @classmethod
    def from_one_sided(cls, alpha: float, coefficients, beurling_mu: Optional[float] = None) -> "WeightSpec":
        """Construir a partir de ĉ(0..M); el lado negativo es el conjugado"""
        positive = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        if positive.size == 0:
            raise InvalidWeightException("c must contain at least c(0)")
        if abs(positive[0].imag) > HERMITIAN_TOL * max(abs(positive[0]), 1.0):
            raise InvalidWeightException("c(0) must be real")
        positive = positive.copy()
        positive[0] = positive[0].real
        two_sided = np.concatenate([np.conj(positive[:0:-1]), positive])
        return cls(alpha=alpha, c_fourier=two_sided, beurling_mu=beurling_mu)

    @classmethod
    def pure(cls, alpha: float) -> "WeightSpec":
        """Peso Fisher–Hartwig puro, c ≡ 1"""
        return cls(alpha=alpha, c_fourier=[1.0])

    @property
    def m(self) -> int:
        return (self.c_fourier.size - 1) // 2

    @property
    def is_pure(self) -> bool:
        return self.m == 0 and self.c_fourier[0] == 1.0

    def c_coefficient(self, k: int) -> complex:
        if abs(k) > self.m:
            return 0j
        return complex(self.c_fourier[k + self.m])

    def c_values(self, theta) -> np.ndarray:
        """c(e^{iθ}) evaluado directamente"""
        theta = np.asarray(theta, dtype=float)
        ks = np.arange(1, self.m + 1)
        values = np.full(theta.shape, self.c_fourier[self.m].real)
        if ks.size:
            phases = np.exp(1j * np.multiply.outer(theta, ks))
            values = values + 2.0 * np.real(phases @ self.c_fourier[self.m + 1:])
        return values

    def c_on_grid(self, size: int):
        """(θ_l, c(θ_l)) en una malla uniforme vía FFT, θ_l = 2πl/L"""
        grid = max(size, 1 << int(np.ceil(np.log2(2 * self.m + 1))))
        buffer = np.zeros(grid, dtype=complex)
        ks = np.arange(-self.m, self.m + 1)
        buffer[ks % grid] = self.c_fourier
        values = np.real(np.fft.ifft(buffer) * grid)
        theta = 2.0 * np.pi * np.arange(grid) / grid
        return theta, values

    def beurling_norm(self) -> Optional[float]:
        """Σ |ĉ(k)| (1+|k|)^μ cuando se declara μ"""
        if self.beurling_mu is None:
            return None
        ks = np.arange(-self.m, self.m + 1)
        return float(np.sum(np.abs(self.c_fourier) * (1.0 + np.abs(ks)) ** self.beurling_mu))


class OuterData(ArrayModel):
    """
    Factorización c = c₁·conj(c₁) con c₁ ∈ H⁺, c₁(0) > 0, y las sucesiones
    β_k^{(α+s)} (s = 0, 1, 2) de 1/((1-z)^{α+s} c₁(z)).
    """
    alpha: float
    c1_fourier: np.ndarray
    inv_c1_fourier: np.ndarray
    c1_at_1: complex
    beta: np.ndarray = Field(..., description="Filas s = 0, 1, 2 con β^{(α+s)}_k")
    iterations: int = 0

    @field_validator("c1_fourier", "inv_c1_fourier", mode="before")
    @classmethod
    def freeze_series(cls, v):
        return readonly(v)

    @field_validator("beta", mode="before")
    @classmethod
    def freeze_beta(cls, v):
        beta = readonly(v)
        if beta.ndim != 2 or beta.shape[0] != 3:
            raise ValueError("beta must have shape (3, n_terms)")
        return beta

    @property
    def n_terms(self) -> int:
        return self.c1_fourier.size

    @property
    def c1_at_0(self) -> float:
        return float(self.c1_fourier[0].real)

    @property
    def phase_at_1(self) -> complex:
        """c₁(1)/conj(c₁(1))"""
        return self.c1_at_1 / np.conj(self.c1_at_1)
