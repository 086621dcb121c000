from enum import Enum
from typing import Iterator, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from app.models.arrays import ArrayModel


class SamplerMethod(str, Enum):
    MCMC = "mcmc"
    DPP = "dpp"


class EnsembleSample(ArrayModel):
    """Una extracción de N argumentos del ensemble circular generalizado"""
    n: int = Field(..., ge=1)
    thetas: np.ndarray

    @field_validator("thetas")
    @classmethod
    def validate_thetas(cls, v):
        v = np.array(v, dtype=float)
        if np.any(np.diff(v) < 0.0):
            raise ValueError("thetas must be sorted")
        if np.any(v <= -np.pi) or np.any(v > np.pi):
            raise ValueError("thetas must lie in (-pi, pi]")
        v.setflags(write=False)
        return v

    @model_validator(mode="after")
    def validate_size(self):
        if self.thetas.shape != (self.n,):
            raise ValueError(f"expected {self.n} angles, got shape {self.thetas.shape}")
        return self


class SamplerDiagnostics(ArrayModel):
    method: SamplerMethod
    seed: int
    n: int
    n_samples: int
    acceptance_rate: Optional[float] = None
    step_size: Optional[float] = None
    autocorrelation_time: Optional[float] = None
    thinning: Optional[int] = None
    effective_sample_size: Optional[float] = None
    chains: Optional[int] = None
    grid_size: Optional[int] = None
    gram_deviation: Optional[float] = None


class SampleStream(ArrayModel):
    """Extracciones apiladas (n_samples, n), cada fila ordenada"""
    thetas: np.ndarray
    diagnostics: SamplerDiagnostics

    @model_validator(mode="after")
    def validate_shape(self):
        if self.thetas.ndim != 2 or self.thetas.shape[1] != self.diagnostics.n:
            raise ValueError("thetas must have shape (n_samples, n)")
        return self

    @property
    def n(self) -> int:
        return self.diagnostics.n

    @property
    def n_samples(self) -> int:
        return int(self.thetas.shape[0])

    def __iter__(self) -> Iterator[EnsembleSample]:
        for row in self.thetas:
            yield EnsembleSample(n=self.n, thetas=row)

    def __len__(self) -> int:
        return self.n_samples


class CountingEstimate(ArrayModel):
    """Histograma de F_N[u/N^q, v/N^q] sobre las extracciones"""
    interval: Tuple[float, float]
    scale_exponent: float = Field(..., ge=0)
    counts: np.ndarray
    n_samples: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_counts(self):
        if int(np.sum(self.counts)) != self.n_samples:
            raise ValueError("histogram must sum to n_samples")
        return self

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.n_samples

    @property
    def std_errors(self) -> np.ndarray:
        p = self.probabilities
        return np.sqrt(p * (1.0 - p) / self.n_samples)

    def probability(self, m: int) -> float:
        return float(self.probabilities[m]) if m < self.counts.size else 0.0

    def std_error(self, m: int) -> float:
        return float(self.std_errors[m]) if m < self.counts.size else 0.0


class IntensityHistogram(ArrayModel):
    """Densidad empírica de los ángulos reescalados Nθ frente a K(u,u)/2π"""
    edges: np.ndarray
    density: np.ndarray
    std_errors: np.ndarray
    predicted: np.ndarray
    n_samples: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])
