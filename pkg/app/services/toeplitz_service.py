from typing import Literal, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from app.config import settings
from app.core.exceptions import (
    LevinsonBreakdownException,
    NormInconsistencyException,
    OracleResidualException,
    OracleSizeException,
    ValidationException,
)
from app.core.quadrature import circle_integral
from app.models.toeplitz import PredictorColumn, ToeplitzSystem
from app.models.weight import WeightSpec
from app.services.weight_service import WeightService


class ToeplitzService:

    @staticmethod
    def toeplitz_system(w: WeightSpec, n: int) -> ToeplitzSystem:
        """Construir T_n(f) a partir de f̂(-n..n)"""
        if n < 0:
            raise ValidationException(f"n={n} must be >= 0")
        return ToeplitzSystem(n=n, diag_coeffs=WeightService.fourier_coefficients(w, n))

    @staticmethod
    def levinson(system: ToeplitzSystem) -> PredictorColumn:
        """
        Recurrencia de Szegő sobre los polinomios mónicos, O(n²).

        Φ_{k+1} = zΦ_k - conj(γ_k) Φ_k*,  h_{k+1} = h_k (1 - |γ_k|²).
        """
        n = system.n
        f_neg = system.first_row
        h = float(f_neg[0].real)
        if h <= 0.0:
            raise LevinsonBreakdownException(0, float("inf"))
        phi = np.ones(1, dtype=complex)
        verblunsky = np.empty(n, dtype=complex)
        norms = np.empty(n + 1)
        norms[0] = h
        for k in range(n):
            # <zΦ_k, 1> = Σ_j φ_j f̂(-(j+1))
            conj_gamma = np.dot(phi, f_neg[1:k + 2]) / h
            modulus = abs(conj_gamma)
            if modulus >= 1.0:
                raise LevinsonBreakdownException(k, modulus)
            updated = np.zeros(k + 2, dtype=complex)
            updated[1:] = phi
            updated[:k + 1] -= conj_gamma * np.conj(phi[::-1])
            phi = updated
            h *= 1.0 - modulus ** 2
            verblunsky[k] = np.conj(conj_gamma)
            norms[k + 1] = h
        return PredictorColumn(
            n=n,
            first_col=np.conj(phi[::-1]) / h,
            verblunsky=verblunsky,
            norm11=1.0 / h,
            norms=norms,
        )

    @staticmethod
    def levinson_first_column(w: WeightSpec, n: int) -> PredictorColumn:
        """Primera columna de T_n(f)^{-1} por Levinson"""
        column = ToeplitzService.levinson(ToeplitzService.toeplitz_system(w, n))
        logger.debug(f"Levinson n={n} alpha={w.alpha}: norm11={column.norm11:.17g}")
        return column

    @staticmethod
    def dense_inverse_column(
        w: WeightSpec, n: int, which: Literal["first", "last"] = "first"
    ) -> np.ndarray:
        """Columna de T_n(f)^{-1} por factorización LU con pivoteo (oráculo)"""
        if n > settings.dense_oracle_max_n:
            raise OracleSizeException(n, settings.dense_oracle_max_n)
        if which not in ("first", "last"):
            raise ValidationException(f"which={which!r} must be 'first' or 'last'")
        matrix = ToeplitzService.toeplitz_system(w, n).matrix()
        rhs = np.zeros(n + 1, dtype=complex)
        rhs[0 if which == "first" else n] = 1.0
        column = linalg.lu_solve(linalg.lu_factor(matrix), rhs)
        residual = float(np.max(np.abs(matrix @ column - rhs)))
        if residual > settings.dense_residual_tol:
            raise OracleResidualException(n, residual)
        return column

    @staticmethod
    def last_column_via_symmetry(p: PredictorColumn) -> np.ndarray:
        """(T_N^{-1})_{·,N+1}: conjugado invertido de la primera columna"""
        return np.conj(p.first_col[::-1])

    @staticmethod
    def residual(system: ToeplitzSystem, p: PredictorColumn) -> float:
        """max |T_n x - e_1|"""
        target = np.zeros(system.n + 1, dtype=complex)
        target[0] = 1.0
        return float(np.max(np.abs(system.matvec(p.first_col) - target)))

    @staticmethod
    def norm_h_values(
        w: WeightSpec, m: int, p: Optional[PredictorColumn] = None
    ) -> Tuple[float, float]:
        """
        h_m por dos caminos: 1/(T_m^{-1})_{1,1} y ∫ f |Φ_m|² dθ/2π.

        Por encima de norm_quadrature_max_degree la integral se evalúa en
        forma de Gram φ^H T_m φ.
        """
        if m < 0:
            raise ValidationException(f"m={m} must be >= 0")
        p = p if p is not None and p.n == m else ToeplitzService.levinson_first_column(w, m)
        from_column = 1.0 / p.norm11
        phi = p.monic_phi
        if m <= settings.norm_quadrature_max_degree:
            def integrand(theta):
                value = np.polynomial.polynomial.polyval(np.exp(1j * theta), phi)
                return np.abs(value) ** 2 * w.c_values(theta)

            from_quadrature = circle_integral(integrand, 2.0 * w.alpha).real
        else:
            system = ToeplitzService.toeplitz_system(w, m)
            from_quadrature = float(np.real(np.vdot(phi, system.matvec(phi))))
        return from_column, float(from_quadrature)

    @staticmethod
    def norm_h(w: WeightSpec, m: int, p: Optional[PredictorColumn] = None) -> float:
        """h_m verificado; error de diagnóstico si los dos caminos discrepan"""
        from_column, from_quadrature = ToeplitzService.norm_h_values(w, m, p)
        if abs(from_column - from_quadrature) > settings.norm_consistency_tol * abs(from_column):
            raise NormInconsistencyException(m, from_column, from_quadrature)
        return from_column
