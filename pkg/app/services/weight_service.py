from typing import Tuple, Union

import numpy as np
from loguru import logger
from scipy import special

from app.config import settings
from app.core.exceptions import (
    FactorizationNotConvergedException,
    IndexOutOfRangeException,
    ValidationException,
)
from app.core.quadrature import algebraic_integral, circle_integral
from app.models.weight import OuterData, WeightSpec


def binomial_series(a: float, n: int) -> np.ndarray:
    """Coeficientes de (1 - z)^{-a} hasta z^{n-1}"""
    k = np.arange(1, n, dtype=float)
    return np.concatenate([[1.0], np.cumprod((k - 1.0 + a) / k)])


class WeightService:

    @staticmethod
    def singular_coefficients(alpha: float, k_max: int) -> np.ndarray:
        """ŝ(0..k_max) de |1 - e^{iθ}|^{2α} (reales y pares)"""
        s0 = special.gamma(2.0 * alpha + 1.0) * special.rgamma(alpha + 1.0) ** 2
        k = np.arange(k_max, dtype=float)
        ratios = (k - alpha) / (k + 1.0 + alpha)
        return s0 * np.concatenate([[1.0], np.cumprod(ratios)])

    @staticmethod
    def singular_coefficient_quadrature(alpha: float, k: int) -> float:
        """ŝ(k) por cuadratura con peso algebraico en θ = 0 (oráculo)"""
        exponent = 2.0 * alpha
        value = algebraic_integral(
            lambda t: np.sinc(t / (2.0 * np.pi)) ** exponent * np.cos(k * t),
            0.0, np.pi, exponent, 0.0,
        )
        return value / np.pi

    @staticmethod
    def fourier_coefficients(w: WeightSpec, k_max: int) -> np.ndarray:
        """
        f̂(-k_max..k_max) respecto a dθ/2π.

        f̂ = ŝ ⊛ ĉ; la posición k + k_max corresponde a f̂(k).
        """
        if k_max < 0:
            raise ValidationException(f"k_max={k_max} must be >= 0")
        reach = k_max + w.m
        one_sided = WeightService.singular_coefficients(w.alpha, reach)
        s_full = np.concatenate([one_sided[:0:-1], one_sided])
        coeffs = np.convolve(s_full, w.c_fourier, mode="valid")
        # hermítica por construcción; se fuerza la igualdad exacta
        return 0.5 * (coeffs + np.conj(coeffs[::-1]))

    @staticmethod
    def weight_eval(w: WeightSpec, theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """f(e^{iθ}) = (2|sin(θ/2)|)^{2α} c(e^{iθ}); +inf en θ = 0 si α < 0"""
        theta_arr = np.asarray(theta, dtype=float)
        base = 2.0 * np.abs(np.sin(0.5 * theta_arr))
        with np.errstate(divide="ignore"):
            singular = np.where(base > 0.0, base ** (2.0 * w.alpha), 0.0 if w.alpha > 0 else np.inf)
        if w.alpha == 0.0:
            singular = np.ones_like(base)
        values = singular * w.c_values(theta_arr)
        return float(values) if np.ndim(theta) == 0 else values

    @staticmethod
    def log_weight(w: WeightSpec, theta: np.ndarray) -> np.ndarray:
        """log f(e^{iθ}); ±inf en θ = 0 según el signo de α"""
        base = 2.0 * np.abs(np.sin(0.5 * theta))
        with np.errstate(divide="ignore"):
            log_singular = 2.0 * w.alpha * np.log(base) if w.alpha != 0.0 else np.zeros_like(base)
        return log_singular + np.log(w.c_values(theta))

    @staticmethod
    def _factorization_grid(n_terms: int) -> int:
        size = settings.factorization_grid
        while size < 2 * n_terms:
            size *= 2
        return size

    @staticmethod
    def outer_factor(w: WeightSpec, n_terms: int) -> OuterData:
        """
        Factorización espectral de c y sucesiones β^{(α+s)}, s = 0, 1, 2.

        Arranque por cepstro (Kolmogorov) y refinamiento de Wilson escalar.
        """
        if n_terms < 1:
            raise ValidationException(f"n_terms={n_terms} must be >= 1")
        size = WeightService._factorization_grid(n_terms)
        _, c_vals = w.c_on_grid(size)
        half = size // 2

        # Kolmogorov: log c₁ = ℓ_0/2 + Σ_{k≥1} ℓ_k z^k
        ell = np.fft.fft(np.log(c_vals)) / size
        cepstrum = np.zeros(size, dtype=complex)
        cepstrum[0] = 0.5 * ell[0]
        cepstrum[1:half] = ell[1:half]
        psi = np.exp(np.fft.ifft(cepstrum) * size)

        # Wilson: ψ ← ψ [c/|ψ|² + 1]_+
        residual = np.inf
        for iteration in range(1, settings.factorization_max_iter + 1):
            ratio = np.fft.fft(c_vals / np.abs(psi) ** 2 + 1.0) / size
            plus = np.zeros(size, dtype=complex)
            plus[0] = 0.5 * ratio[0]
            plus[1:half] = ratio[1:half]
            psi_new = psi * (np.fft.ifft(plus) * size)
            residual = float(np.max(np.abs(psi_new - psi)) / np.max(np.abs(psi)))
            psi = psi_new
            if residual <= settings.factorization_tol:
                break
        else:
            raise FactorizationNotConvergedException(settings.factorization_max_iter, residual)

        coeffs = np.fft.fft(psi) / size
        # c₁(0) real y positivo
        phase = coeffs[0] / abs(coeffs[0])
        coeffs = coeffs * np.conj(phase)
        psi = psi * np.conj(phase)
        inverse = np.fft.fft(1.0 / psi) / size

        c1 = coeffs[:n_terms]
        inv_c1 = inverse[:n_terms]
        beta = np.vstack([
            np.convolve(binomial_series(w.alpha + shift, n_terms), inv_c1)[:n_terms]
            for shift in range(3)
        ])
        logger.debug(
            f"Factorización espectral: malla {size}, {iteration} iteraciones, residuo {residual:.2e}"
        )
        return OuterData(
            alpha=w.alpha,
            c1_fourier=c1,
            inv_c1_fourier=inv_c1,
            c1_at_1=complex(psi[0]),
            beta=beta,
            iterations=iteration,
        )

    @staticmethod
    def beta_coefficient(d: OuterData, shift: int, k: int) -> complex:
        """β_k^{(α+shift)}"""
        if shift not in (0, 1, 2):
            raise IndexOutOfRangeException("shift", shift, 3)
        if k < 0 or k >= d.n_terms:
            raise IndexOutOfRangeException("k", k, d.n_terms)
        return complex(d.beta[shift, k])

    @staticmethod
    def factorization_defect(w: WeightSpec, d: OuterData) -> float:
        """max_k |(c₁ ⊛ conj c₁ reflejado)(k) - ĉ(k)| para |k| <= M"""
        product = np.convolve(d.c1_fourier, np.conj(d.c1_fourier[::-1]))
        centre = d.n_terms - 1
        reach = min(w.m, centre)
        rebuilt = product[centre - reach:centre + reach + 1]
        target = w.c_fourier[w.m - reach:w.m + reach + 1]
        return float(np.max(np.abs(rebuilt - target)))

    @staticmethod
    def outer_reconstruction_defect(w: WeightSpec, d: OuterData, theta: np.ndarray) -> float:
        """Error relativo máximo de |g_α|² frente a f en los puntos dados (θ != 0)"""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        c1_vals = np.polynomial.polynomial.polyval(z, d.c1_fourier)
        g_sq = np.abs(1.0 - z) ** (2.0 * w.alpha) * np.abs(c1_vals) ** 2
        f_vals = WeightService.weight_eval(w, theta)
        return float(np.max(np.abs(g_sq / f_vals - 1.0)))

    @staticmethod
    def parseval_check(w: WeightSpec, k_max: int) -> Tuple[float, float]:
        """(Σ_{|k|<=k_max} |f̂(k)|², ∫ f² dθ/2π); requiere |α| < 1/4"""
        if abs(w.alpha) >= 0.25:
            raise ValidationException("Parseval check requires |alpha| < 1/4 (f in L^2)")
        coeffs = WeightService.fourier_coefficients(w, k_max)
        total = float(np.sum(np.abs(coeffs) ** 2)) + WeightService.parseval_tail(w, k_max)
        integral = circle_integral(lambda t: w.c_values(t) ** 2, 4.0 * w.alpha)
        return total, float(integral.real)

    @staticmethod
    def parseval_tail(w: WeightSpec, k_max: int) -> float:
        """
        Σ_{|k|>k_max} |f̂(k)|² a partir de la forma exacta de ŝ(k) para k >= 1.

        ŝ(k) = -sin(πα)Γ(2α+1)/π · Γ(k-α)/Γ(k+α+1) y f̂(k) = Σ_j ĉ(j) ŝ(k-j);
        la suma sobre k > k_max se toma como ∫_{k_max+1/2}^∞ (regla del punto
        medio), con error O(k_max^(-3-4α)).
        """
        if k_max < w.m:
            raise ValidationException(f"k_max={k_max} must be at least M={w.m} for the tail estimate")
        if w.alpha == 0.0:
            return 0.0
        alpha = w.alpha
        scale = np.sin(np.pi * alpha) * special.gamma(2.0 * alpha + 1.0) / np.pi
        shifts = np.arange(-w.m, w.m + 1, dtype=float)
        start = k_max + 0.5
        exponent = 1.0 + 2.0 * alpha
        limit = abs(np.sum(w.c_fourier)) ** 2

        def smooth(t: float) -> float:
            # x = start/t; x^(1+2α) ŝ(x-j)/scale -> 1 cuando t -> 0
            if t < 1e-12:
                return limit
            x = start / t
            ratios = np.exp(
                special.gammaln(x - shifts - alpha)
                - special.gammaln(x - shifts + alpha + 1.0)
                + exponent * np.log(x)
            )
            return abs(np.dot(w.c_fourier, ratios)) ** 2

        # ∫_start^∞ g(x) dx = start^(-1-4α) ∫_0^1 smooth(t) t^(4α) dt
        value = algebraic_integral(smooth, 0.0, 1.0, 4.0 * alpha, 0.0)
        # k < -k_max aporta lo mismo: f̂(-k) = conj(f̂(k))
        return float(2.0 * scale ** 2 * start ** (-1.0 - 4.0 * alpha) * value)
