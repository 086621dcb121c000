import numpy as np
from pydantic import Field, field_validator, model_validator
from scipy import linalg

from app.models.arrays import ArrayModel, readonly


class ToeplitzSystem(ArrayModel):
    """T_N(f) = (f̂(i-j))_{0<=i,j<=N}; diag_coeffs guarda f̂(-N..N)"""
    n: int = Field(..., ge=0)
    diag_coeffs: np.ndarray

    @field_validator("diag_coeffs", mode="before")
    @classmethod
    def freeze_coeffs(cls, v):
        return readonly(v)

    @model_validator(mode="after")
    def validate_length(self):
        if self.diag_coeffs.size != 2 * self.n + 1:
            raise ValueError("diag_coeffs must hold f̂(-N..N)")
        return self

    def coefficient(self, k: int) -> complex:
        return complex(self.diag_coeffs[k + self.n])

    @property
    def first_column(self) -> np.ndarray:
        """f̂(0..N)"""
        return self.diag_coeffs[self.n:]

    @property
    def first_row(self) -> np.ndarray:
        """f̂(0), f̂(-1), ..., f̂(-N)"""
        return self.diag_coeffs[self.n::-1]

    def matrix(self) -> np.ndarray:
        return linalg.toeplitz(self.first_column, self.first_row)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """T_N x vía FFT"""
        return linalg.matmul_toeplitz((self.first_column, self.first_row), x)


class PredictorColumn(ArrayModel):
    """
    Primera columna exacta de T_N(f)^{-1}.

    norms guarda h_0..h_N (h_m = ‖Φ_m‖² = 1/(T_m^{-1})_{1,1}).
    """
    n: int = Field(..., ge=0)
    first_col: np.ndarray
    verblunsky: np.ndarray
    norm11: float
    norms: np.ndarray

    @field_validator("first_col", "verblunsky", mode="before")
    @classmethod
    def freeze_complex(cls, v):
        return readonly(v)

    @field_validator("norms", mode="before")
    @classmethod
    def freeze_real(cls, v):
        return readonly(v, dtype=float)

    @field_validator("norm11")
    @classmethod
    def validate_norm11(cls, v):
        if not np.isfinite(v) or v <= 0.0:
            raise ValueError("norm11 must be real and > 0")
        return v

    @model_validator(mode="after")
    def validate_shapes(self):
        if self.first_col.size != self.n + 1 or self.verblunsky.size != self.n:
            raise ValueError("first_col must have N+1 entries and verblunsky N entries")
        if self.norms.size != self.n + 1:
            raise ValueError("norms must hold h_0..h_N")
        if self.n and np.max(np.abs(self.verblunsky)) >= 1.0:
            raise ValueError("Verblunsky coefficients must satisfy |gamma| < 1")
        return self

    @property
    def h(self) -> float:
        """h_N = 1/norm11"""
        return float(self.norms[-1])

    @property
    def monic_phi(self) -> np.ndarray:
        """Coeficientes de Φ_N mónico (grado creciente)"""
        return np.conj(self.first_col[::-1]) / self.norm11
