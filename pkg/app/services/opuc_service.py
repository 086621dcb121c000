from typing import List, Literal, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from app.config import settings
from app.core.quadrature import circle_integral
from app.core.exceptions import ValidationException
from app.models.opuc import CDKernelExact, Normalization, OrthogonalPair
from app.models.toeplitz import PredictorColumn
from app.models.weight import WeightSpec
from app.services.toeplitz_service import ToeplitzService
from app.services.weight_service import WeightService

ArrayLike = Union[float, complex, np.ndarray]


class OpucService:

    @staticmethod
    def build_pair(
        p: PredictorColumn,
        w: WeightSpec,
        normalization: Normalization = Normalization.MONIC,
        check_norm: bool = True,
    ) -> OrthogonalPair:
        """Φ_N* y Φ_N desde la primera columna; h_N verificado por norm_h"""
        h = ToeplitzService.norm_h(w, p.n, p) if check_norm else 1.0 / p.norm11
        if normalization == Normalization.MONIC:
            star = p.first_col / p.norm11
        elif normalization == Normalization.PREDICTOR:
            star = p.first_col / np.sqrt(p.norm11)
        else:
            star = np.array(p.first_col)
        return OrthogonalPair(
            n=p.n,
            normalization=normalization,
            phi_star_coeffs=star,
            phi_coeffs=np.conj(star[::-1]),
            h=h,
            verblunsky=p.verblunsky,
            norms=p.norms,
        )

    @staticmethod
    def star(coeffs: np.ndarray) -> np.ndarray:
        """Operación * sobre coeficientes: z^N conj(Φ(1/z̄))"""
        return np.conj(np.asarray(coeffs)[::-1])

    @staticmethod
    def eval_poly(
        pair: OrthogonalPair,
        which: Literal["phi", "phi_star"],
        j: int,
        z: ArrayLike,
    ) -> ArrayLike:
        """Derivada j-ésima por Horner en la normalización del par"""
        if j < 0:
            raise ValidationException(f"derivative order j={j} must be >= 0")
        if which not in ("phi", "phi_star"):
            raise ValidationException(f"which={which!r} must be 'phi' or 'phi_star'")
        coeffs = pair.phi_coeffs if which == "phi" else pair.phi_star_coeffs
        if j > pair.n:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        return P.polyval(z, P.polyder(coeffs, j) if j else coeffs)

    @staticmethod
    def family_values(
        verblunsky: np.ndarray, z: np.ndarray, count: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Φ_m(z) y Φ_m*(z) para m = 0..count-1 (mónicos) por la recurrencia de Szegő.

        Devuelve dos arrays de forma (count, len(z)).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if count - 1 > verblunsky.size:
            raise ValidationException(f"need {count - 1} Verblunsky coefficients, have {verblunsky.size}")
        phi = np.empty((count, z.size), dtype=complex)
        phi_star = np.empty((count, z.size), dtype=complex)
        phi[0] = 1.0
        phi_star[0] = 1.0
        for m in range(count - 1):
            gamma = verblunsky[m]
            phi[m + 1] = z * phi[m] - np.conj(gamma) * phi_star[m]
            phi_star[m + 1] = phi_star[m] - gamma * z * phi[m]
        return phi, phi_star

    @staticmethod
    def monic_family(verblunsky: np.ndarray, count: int) -> List[np.ndarray]:
        """Coeficientes mónicos de Φ_0..Φ_{count-1}"""
        family = [np.ones(1, dtype=complex)]
        for m in range(count - 1):
            current = family[-1]
            updated = np.zeros(m + 2, dtype=complex)
            updated[1:] = current
            updated[:m + 1] -= np.conj(verblunsky[m]) * np.conj(current[::-1])
            family.append(updated)
        return family

    @staticmethod
    def exact_kernel(w: WeightSpec, n: int) -> CDKernelExact:
        """K_N exacto a partir de Levinson de grado N"""
        column = ToeplitzService.levinson_first_column(w, n)
        pair = OpucService.build_pair(column, w, Normalization.MONIC)
        return CDKernelExact(n=n, pair=pair, weight=w)

    @staticmethod
    def cd_kernel_exact(
        k: CDKernelExact, theta: ArrayLike, theta_prime: ArrayLike, weighted: bool = True
    ) -> ArrayLike:
        """
        K_N(θ, θ') por la fórmula de Christoffel–Darboux de un término.

        Con |θ - θ'| < coincident_tol se usa la derivada analítica del
        numerador. weighted=False omite el factor √f(θ)√f(θ').
        """
        scalar = np.ndim(theta) == 0 and np.ndim(theta_prime) == 0
        theta, theta_prime = np.broadcast_arrays(
            np.asarray(theta, dtype=float), np.asarray(theta_prime, dtype=float)
        )
        phi = k.pair.monic_phi
        phi_star = k.pair.monic_phi_star
        zeta = np.exp(1j * theta)
        z = np.exp(1j * theta_prime)

        star_zeta, star_z = P.polyval(zeta, phi_star), P.polyval(z, phi_star)
        phi_zeta, phi_z = P.polyval(zeta, phi), P.polyval(z, phi)
        numerator = np.conj(star_zeta) * star_z - np.conj(phi_zeta) * phi_z
        denominator = 1.0 - np.conj(zeta) * z

        coincident = np.abs(theta - theta_prime) < settings.coincident_tol
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(coincident, 0.0, numerator / denominator)
        if np.any(coincident):
            zc = zeta[coincident]
            d_star = P.polyval(zc, P.polyder(phi_star))
            d_phi = P.polyval(zc, P.polyder(phi))
            diagonal = -zc * (
                np.conj(star_zeta[coincident]) * d_star - np.conj(phi_zeta[coincident]) * d_phi
            )
            values = values.astype(complex)
            values[coincident] = diagonal.real
        values = values / k.pair.h
        if weighted:
            values = values * np.sqrt(
                WeightService.weight_eval(k.weight, theta) * WeightService.weight_eval(k.weight, theta_prime)
            )
        return complex(values) if scalar else values

    @staticmethod
    def cd_kernel_msum(
        k: CDKernelExact, theta: ArrayLike, theta_prime: ArrayLike, weighted: bool = True
    ) -> ArrayLike:
        """K_N(θ, θ') = √f√f' Σ_{m<N} conj(Φ_m(e^{iθ})) Φ_m(e^{iθ'}) / h_m"""
        scalar = np.ndim(theta) == 0 and np.ndim(theta_prime) == 0
        theta, theta_prime = np.broadcast_arrays(
            np.asarray(theta, dtype=float), np.asarray(theta_prime, dtype=float)
        )
        shape = theta.shape
        left, _ = OpucService.family_values(k.pair.verblunsky, np.exp(1j * theta.ravel()), k.n)
        right, _ = OpucService.family_values(k.pair.verblunsky, np.exp(1j * theta_prime.ravel()), k.n)
        norms = k.pair.norms[:k.n, None]
        values = np.sum(np.conj(left) * right / norms, axis=0).reshape(shape)
        if weighted:
            values = values * np.sqrt(
                WeightService.weight_eval(k.weight, theta) * WeightService.weight_eval(k.weight, theta_prime)
            )
        return complex(values) if scalar else values

    @staticmethod
    def orthogonality_residual(w: WeightSpec, verblunsky: np.ndarray, n: int, m: int) -> complex:
        """∫ f Φ_n conj(Φ_m) dθ/2π por cuadratura"""
        family = OpucService.monic_family(verblunsky, max(n, m) + 1)

        def integrand(theta):
            z = np.exp(1j * theta)
            return P.polyval(z, family[n]) * np.conj(P.polyval(z, family[m])) * w.c_values(theta)

        return circle_integral(integrand, 2.0 * w.alpha)
