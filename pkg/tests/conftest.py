import numpy as np
import pytest
from scipy import special

from app.models.kernel import LimitKernel
from app.models.weight import WeightSpec


def pure_h(alpha: float, n: int) -> float:
    """h_n = Γ(n+1)Γ(n+2α+1)/Γ(n+α+1)² para c ≡ 1"""
    return float(np.exp(
        special.gammaln(n + 1.0) + special.gammaln(n + 2.0 * alpha + 1.0) - 2.0 * special.gammaln(n + alpha + 1.0)
    ))


def pure_phi_at_one(alpha: float, n: int) -> float:
    """Φ_n(1) = Φ_n*(1) = Γ(n+2α+1)Γ(α+1)/(Γ(2α+1)Γ(n+α+1)) para c ≡ 1"""
    return float(np.exp(
        special.gammaln(n + 2.0 * alpha + 1.0) - special.gammaln(n + alpha + 1.0)
    ) * special.gamma(alpha + 1.0) / special.gamma(2.0 * alpha + 1.0))


@pytest.fixture
def pure_weight() -> WeightSpec:
    return WeightSpec.pure(0.25)


@pytest.fixture
def smooth_weight() -> WeightSpec:
    """c = |1 + 0.3z|², c₁ = 1 + 0.3z"""
    return WeightSpec.from_one_sided(0.25, [1.09, 0.3])


@pytest.fixture
def complex_weight() -> WeightSpec:
    """c con coeficientes complejos (no simétrico en θ)"""
    return WeightSpec.from_one_sided(-0.2, [1.0, 0.2 + 0.1j, 0.05j])


@pytest.fixture
def positive_kernel() -> LimitKernel:
    return LimitKernel.for_alpha(0.25)


@pytest.fixture
def negative_kernel() -> LimitKernel:
    return LimitKernel.for_alpha(-0.25)
