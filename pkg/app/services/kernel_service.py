from typing import Dict, Union

import numpy as np
from scipy import special

from app.config import settings
from app.core.exceptions import KernelDomainException
from app.core.quadrature import gamma_beta, jacobi_unit_rule
from app.models.kernel import Gauge, KernelBranch, LimitKernel

ArrayLike = Union[float, np.ndarray]


def _node_count(u: np.ndarray) -> int:
    reach = float(np.max(np.abs(u))) if u.size else 0.0
    return max(settings.jacobi_nodes, int(np.ceil(1.5 * reach)) + 32)


def _fourier(u: np.ndarray, x: np.ndarray, w: np.ndarray, sign: float = 1.0) -> np.ndarray:
    return np.exp(sign * 1j * np.multiply.outer(u, x)) @ w


class KernelService:

    @staticmethod
    def psi(alpha: float, u: ArrayLike) -> ArrayLike:
        """ψ(α,u) = ∫_0^1 x^{α-1}(1-x)^α e^{iux} dx, 0 < α < 1/2"""
        if not 0.0 < alpha < 0.5:
            raise KernelDomainException(f"psi requires 0 < alpha < 1/2, got {alpha}")
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        x, w = jacobi_unit_rule(_node_count(u_arr), alpha - 1.0, alpha)
        values = _fourier(u_arr, x, w)
        return complex(values[0]) if np.ndim(u) == 0 else values

    @staticmethod
    def tau(alpha: float, u: ArrayLike) -> ArrayLike:
        """τ(α,u) = ∫_0^1 x^α(1-x)^α e^{iux} dx"""
        if not abs(alpha) < 0.5:
            raise KernelDomainException(f"tau requires |alpha| < 1/2, got {alpha}")
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        x, w = jacobi_unit_rule(_node_count(u_arr), alpha, alpha)
        values = _fourier(u_arr, x, w)
        return complex(values[0]) if np.ndim(u) == 0 else values

    @staticmethod
    def psi_tilde(alpha: float, u: ArrayLike) -> ArrayLike:
        """
        ψ̃(α,u) = ∫_0^1 x^{α-1}((1-x)^α e^{-iux} - 1) dx + 1/α, -1/2 < α < 0.

        Se separa B(α, α+1) y queda ∫ x^α(1-x)^α (e^{-iux}-1)/x dx, de
        integrando entero.
        """
        if not -0.5 < alpha < 0.0:
            raise KernelDomainException(f"psi_tilde requires -1/2 < alpha < 0, got {alpha}")
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        x, w = jacobi_unit_rule(_node_count(u_arr), alpha, alpha)
        oscillating = (np.expm1(-1j * np.multiply.outer(u_arr, x)) / x) @ w
        values = gamma_beta(alpha, alpha + 1.0) + oscillating
        return complex(values[0]) if np.ndim(u) == 0 else values

    @staticmethod
    def rho(k: LimitKernel, u: np.ndarray) -> np.ndarray:
        """ρ ≡ ψ (α > 0) o ρ(u) = ψ̃(α, -u) (α < 0)"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if k.branch == KernelBranch.POSITIVE_ALPHA:
            return KernelService.psi(k.alpha, u)
        return KernelService.psi_tilde(k.alpha, -u)

    @staticmethod
    def _prefactor(k: LimitKernel) -> float:
        factor = float(special.rgamma(k.alpha) ** 2)
        return factor / k.c1_at_1_sq if k.apply_c_factor else factor

    @staticmethod
    def diagonal(k: LimitKernel, u: ArrayLike) -> ArrayLike:
        """K(u,u) = |u|^{2α}/Γ(α)² (|ρ(u)|² - 2 Re(ρ(u) τ(α,-u)))"""
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any(u_arr == 0.0):
            raise KernelDomainException("kernel is not defined at u = 0")
        rho_u = KernelService.rho(k, u_arr)
        tau_minus = KernelService.tau(k.alpha, -u_arr)
        values = (
            KernelService._prefactor(k) * np.abs(u_arr) ** (2.0 * k.alpha)
            * (np.abs(rho_u) ** 2 - 2.0 * np.real(rho_u * tau_minus))
        )
        return float(values[0]) if np.ndim(u) == 0 else values

    @staticmethod
    def kernel_matrix(k: LimitKernel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Matriz K(u_i, v_j); la diagonal se toma del límite analítico"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if np.any(u == 0.0) or np.any(v == 0.0):
            raise KernelDomainException("kernel is not defined at u = 0 or v = 0")
        rho_u, rho_mu = KernelService.rho(k, u), KernelService.rho(k, -u)
        rho_v, rho_mv = KernelService.rho(k, v), KernelService.rho(k, -v)

        diff = np.subtract.outer(u, v)
        phase = np.exp(-1j * diff)  # e^{i(v-u)}
        numerator = np.outer(rho_mu, rho_v) - phase * np.outer(rho_u, rho_mv)
        coincident = np.abs(diff) < settings.coincident_tol
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(coincident, 0.0, numerator / (1j * diff))
        values = KernelService._prefactor(k) * np.outer(np.abs(u) ** k.alpha, np.abs(v) ** k.alpha) * values
        if np.any(coincident):
            rows, _ = np.nonzero(coincident)
            values[coincident] = KernelService.diagonal(k, u[rows])
        if k.gauge == Gauge.THEOREM:
            values = np.exp(1j * u)[:, None] * values * np.exp(-1j * v)[None, :]
        return values

    @staticmethod
    def kernel_eval(k: LimitKernel, u: float, v: float) -> complex:
        """K(u, v) en el gauge del núcleo"""
        return complex(KernelService.kernel_matrix(k, np.array([u]), np.array([v]))[0, 0])

    @staticmethod
    def diagonal_variants(k: LimitKernel, u: float) -> Dict[str, float]:
        """
        Referencia: límite v → u del núcleo fuera de la diagonal (Richardson).
        Frente a ella se juzgan la diagonal analítica y las dos impresas,
        |ρ|² - 2Re(ρ(u)τ(-u)) y 2Re(ρ(u)τ(u)).
        """
        rho_u = complex(KernelService.rho(k, np.array([u]))[0])
        scale = KernelService._prefactor(k) * abs(u) ** (2.0 * k.alpha)
        analytic = KernelService.diagonal(k, u)
        with_conjugate = scale * (abs(rho_u) ** 2 - 2.0 * np.real(rho_u * KernelService.tau(k.alpha, -u)))
        without_modulus = scale * 2.0 * np.real(rho_u * KernelService.tau(k.alpha, u))
        return {
            "limit": float(KernelService.diagonal_limit(k, u).real),
            "analytic": float(analytic),
            "modulus_minus_cross": float(with_conjugate),
            "cross_only": float(without_modulus),
        }

    @staticmethod
    def diagonal_limit(k: LimitKernel, u: float, step: float = 1e-3) -> complex:
        """lim_{v→u} K(u,v) por extrapolación de Richardson; v no cruza 0"""
        step = min(step, abs(u) / 4.0)
        values = [KernelService.kernel_eval(k, u, u + step / 2 ** i) for i in range(3)]
        first = [2.0 * values[i + 1] - values[i] for i in range(2)]
        return (4.0 * first[1] - first[0]) / 3.0
