from enum import Enum

import numpy as np
from pydantic import Field, model_validator

from app.core.exceptions import KernelDomainException
from app.models.arrays import ArrayModel


class KernelBranch(str, Enum):
    POSITIVE_ALPHA = "positive_alpha"  # ρ = ψ
    NEGATIVE_ALPHA = "negative_alpha"  # ρ(u) = ψ̃(α, -u)


class Gauge(str, Enum):
    PROOF = "proof"
    THEOREM = "theorem"  # e^{iu} K(u,v) e^{-iv}


class LimitKernel(ArrayModel):
    """Núcleo límite K(u, v) de los polinomios reescalados en z = 1"""
    alpha: float
    c1_at_1_sq: float = Field(1.0, gt=0, description="|c₁(1)|², el c(1) de los enunciados")
    branch: KernelBranch
    gauge: Gauge = Gauge.PROOF
    apply_c_factor: bool = Field(False, description="Dividir por c(1); se cancela en el límite")

    @model_validator(mode="after")
    def validate_branch(self):
        if self.alpha == 0.0 or not np.isfinite(self.alpha) or abs(self.alpha) >= 0.5:
            raise KernelDomainException(f"alpha={self.alpha} must satisfy 0 < |alpha| < 1/2")
        expected = KernelBranch.POSITIVE_ALPHA if self.alpha > 0 else KernelBranch.NEGATIVE_ALPHA
        if self.branch != expected:
            raise KernelDomainException(f"branch {self.branch.value} does not match alpha={self.alpha}")
        return self

    @classmethod
    def for_alpha(cls, alpha: float, **kwargs) -> "LimitKernel":
        """Elegir la rama según el signo de α"""
        branch = KernelBranch.POSITIVE_ALPHA if alpha > 0 else KernelBranch.NEGATIVE_ALPHA
        return cls(alpha=alpha, branch=branch, **kwargs)
