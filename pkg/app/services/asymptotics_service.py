"""
Predicciones asintóticas para las columnas de T_N(f)^{-1} y para Φ_N, Φ_N*
cerca de z = 1.

Las predicciones de columna llevan el factor conj(β_0^{(α)}) = 1/c₁(0) y las
de valores en z = 1 el factor c₁(0); ambos valen 1 con la normalización
c₁(0) = 1.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import special

from app.core.exceptions import AsymptoticFormMismatchException, ValidationException
from app.core.quadrature import beta_integral, subtracted_beta_integral
from app.models.asymptotics import AsymptoticPrediction, Regime
from app.models.weight import OuterData
from app.services.weight_service import WeightService

FORM_TOL = 1e-10


def _column_factor(d: OuterData) -> complex:
    return complex(np.conj(d.beta[0, 0]))


def _check_forms(integral_form: float, gamma_form: float) -> None:
    if abs(integral_form - gamma_form) > FORM_TOL * max(abs(gamma_form), 1.0):
        raise AsymptoticFormMismatchException(integral_form, gamma_form)


class AsymptoticsService:

    @staticmethod
    def k_alpha(alpha: float, x: float) -> float:
        """K_α(x) = x^{α-1} (1-x)^α / Γ(α)"""
        return float(x ** (alpha - 1.0) * (1.0 - x) ** alpha * special.rgamma(alpha))

    @staticmethod
    def edge_column_asym(d: OuterData, k: int, n: int) -> AsymptoticPrediction:
        """(T_N^{-1})_{k+1,1} ≈ β_k^{(α)} - (α²/N) β_k^{(α+1)}"""
        alpha = d.alpha
        value = WeightService.beta_coefficient(d, 0, k) - alpha ** 2 / n * WeightService.beta_coefficient(d, 1, k)
        return AsymptoticPrediction(
            value=_column_factor(d) * value, order_exponent=-2.0,
            regime=Regime.EDGE_LOW_K, n=n, index=k,
        )

    @staticmethod
    def edge_column_one_term(d: OuterData, k: int, n: int) -> AsymptoticPrediction:
        """Solo el término β_k^{(α)} (referencia para medir la corrección)"""
        return AsymptoticPrediction(
            value=_column_factor(d) * WeightService.beta_coefficient(d, 0, k),
            order_exponent=-1.0, regime=Regime.EDGE_LOW_K, n=n, index=k,
        )

    @staticmethod
    def far_edge_column_asym(d: OuterData, k: int, n: int) -> AsymptoticPrediction:
        """(T_N^{-1})_{N+1-k,1} ≈ (c₁(1)/conj c₁(1)) β_k^{(α+1)} α/N"""
        value = d.phase_at_1 * WeightService.beta_coefficient(d, 1, k) * d.alpha / n
        return AsymptoticPrediction(
            value=_column_factor(d) * value, order_exponent=-1.0,
            regime=Regime.EDGE_HIGH_K, n=n, index=k,
        )

    @staticmethod
    def bulk_column_asym(d: OuterData, x: float, n: int) -> AsymptoticPrediction:
        """(T_N^{-1})_{[Nx]+1,1} ≈ K_α(x) N^{α-1} / c₁(1)"""
        if not 0.0 < x < 1.0:
            raise ValidationException(f"x={x} must lie in (0, 1)")
        value = AsymptoticsService.k_alpha(d.alpha, x) * n ** (d.alpha - 1.0) / d.c1_at_1
        return AsymptoticPrediction(
            value=_column_factor(d) * value, order_exponent=None,
            regime=Regime.BULK, n=n, index=x,
        )

    @staticmethod
    def phi_star_constant(alpha: float, j: int) -> Tuple[Optional[float], float]:
        """
        (forma integral, forma Gamma) de la constante de (Φ_N*)^{(j)}(1)
        sin el factor 1/c₁(1).
        """
        gamma_form = float(special.poch(alpha, j) * special.gamma(alpha + 1.0) * special.rgamma(2.0 * alpha + j + 1.0))
        if alpha == 0.0:
            return None, gamma_form
        if alpha + j > 0.0:
            integral = beta_integral(alpha + j, alpha)
        else:
            integral = subtracted_beta_integral(alpha, alpha)
        return float(integral * special.rgamma(alpha)), gamma_form

    @staticmethod
    def phi_constant(alpha: float, j: int) -> Tuple[Optional[float], float]:
        """(forma integral, forma Gamma) de la constante de Φ_N^{(j)}(1)"""
        gamma_form = float(special.gamma(alpha + j + 1.0) * special.rgamma(2.0 * alpha + j + 1.0))
        if alpha == 0.0:
            return None, gamma_form
        if alpha > 0.0:
            integral = beta_integral(alpha, alpha + j)
        else:
            integral = subtracted_beta_integral(alpha, alpha + j)
        return float(integral * special.rgamma(alpha)), gamma_form

    @staticmethod
    def _at_one(d: OuterData, n: int, j: int, constants, denominator: complex) -> AsymptoticPrediction:
        if j < 0:
            raise ValidationException(f"derivative order j={j} must be >= 0")
        integral_form, gamma_form = constants
        if integral_form is not None:
            _check_forms(integral_form, gamma_form)
        value = d.c1_at_0 * n ** (d.alpha + j) * gamma_form / denominator
        return AsymptoticPrediction(
            value=complex(value), order_exponent=d.alpha + j,
            regime=Regime.AT_ONE if j == 0 else Regime.DERIVATIVE_AT_ONE,
            n=n, index=j, integral_form=integral_form, gamma_form=gamma_form,
        )

    @staticmethod
    def phi_star_at_one_asym(d: OuterData, n: int, j: int) -> AsymptoticPrediction:
        """(Φ_N*)^{(j)}(1) ≈ N^{α+j} Γ(α+j)Γ(α+1) / (Γ(2α+j+1) Γ(α) c₁(1))"""
        return AsymptoticsService._at_one(
            d, n, j, AsymptoticsService.phi_star_constant(d.alpha, j), d.c1_at_1
        )

    @staticmethod
    def phi_at_one_asym(d: OuterData, n: int, j: int) -> AsymptoticPrediction:
        """Φ_N^{(j)}(1) ≈ N^{α+j} Γ(α+j+1) / (Γ(2α+j+1) conj c₁(1))"""
        return AsymptoticsService._at_one(
            d, n, j, AsymptoticsService.phi_constant(d.alpha, j), np.conj(d.c1_at_1)
        )

    @staticmethod
    def beta_identity_defect(alpha: float, j: int) -> float:
        """|∫ x^{α+j-1}(1-x)^α dx - Γ(α+j)Γ(α+1)/Γ(2α+j+1)|"""
        if alpha + j > 0.0:
            integral = beta_integral(alpha + j, alpha)
        else:
            integral = subtracted_beta_integral(alpha, alpha)
        gamma_form = special.gamma(alpha + j) * special.gamma(alpha + 1.0) * special.rgamma(2.0 * alpha + j + 1.0)
        return float(abs(integral - gamma_form))

    # Coeficientes β̃_u de Φ_N (última columna cruda)

    @staticmethod
    def corollary_tail_asym(d: OuterData, k: int, n: int) -> AsymptoticPrediction:
        """β̃_{N-k} ≈ conj(β_k^{(α)}) - (α²/N) conj(β_k^{(α+1)})"""
        edge = AsymptoticsService.edge_column_asym(d, k, n)
        return edge.model_copy(update={"value": np.conj(edge.value)})

    @staticmethod
    def corollary_head_asym(d: OuterData, k: int, n: int) -> AsymptoticPrediction:
        """β̃_k ≈ conj((c₁(1)/conj c₁(1)) β_k^{(α+1)}) α/N"""
        far = AsymptoticsService.far_edge_column_asym(d, k, n)
        return far.model_copy(update={"value": np.conj(far.value)})

    @staticmethod
    def corollary_bulk_asym(d: OuterData, x: float, n: int) -> AsymptoticPrediction:
        """β̃_{[Nx]} ≈ K_α(1-x) N^{α-1} / conj c₁(1)"""
        bulk = AsymptoticsService.bulk_column_asym(d, 1.0 - x, n)
        return bulk.model_copy(update={"value": np.conj(bulk.value), "index": x})

    @staticmethod
    def remainder_constant(
        d: OuterData, first_col: np.ndarray, n: int, k_values: Sequence[int]
    ) -> float:
        """C empírica en |error| <= C k^{α+1}/N² (k >= 1)"""
        ratios = [
            abs(first_col[k] - AsymptoticsService.edge_column_asym(d, k, n).value) * n ** 2 / k ** (d.alpha + 1.0)
            for k in k_values if k >= 1
        ]
        return float(max(ratios)) if ratios else 0.0

    @staticmethod
    def norm_relation(d: OuterData, n: int, norm11: float) -> Tuple[float, float, float]:
        """(|β_0|²(1-α²/N), (T_N^{-1})_{1,1}, desviación relativa)"""
        predicted = float(abs(d.beta[0, 0]) ** 2 * (1.0 - d.alpha ** 2 / n))
        return predicted, norm11, abs(norm11 / predicted - 1.0)

    @staticmethod
    def estimate_orders(n_values: Sequence[int], errors: Sequence[float]) -> List[float]:
        """-log(e_{i}/e_{i-1}) / log(N_i/N_{i-1}); nan en la primera fila"""
        orders = [float("nan")]
        for i in range(1, len(n_values)):
            n0, n1 = n_values[i - 1], n_values[i]
            e0, e1 = errors[i - 1], errors[i]
            if e0 > 0.0 and e1 > 0.0 and n1 != n0:
                orders.append(float(np.log(e0 / e1) / np.log(n1 / n0)))
            else:
                orders.append(float("nan"))
        if len(orders) > 1:
            logger.debug(f"Órdenes estimados: {orders[1:]}")
        return orders
