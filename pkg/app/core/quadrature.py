"""
Reglas de cuadratura compartidas por los servicios.

Gauss–Jacobi / Gauss–Legendre (cacheadas) y las integrales con peso
algebraico de QUADPACK (``quad(..., weight="alg")``) para las
singularidades en los extremos.
"""
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy import integrate, special

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 400


def _frozen(*arrays: np.ndarray) -> Tuple[np.ndarray, ...]:
    for array in arrays:
        array.setflags(write=False)
    return arrays


@lru_cache(maxsize=128)
def gauss_jacobi(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss–Jacobi en [-1, 1] con peso (1-t)^a (1+t)^b"""
    nodes, weights = special.roots_jacobi(n, a, b)
    return _frozen(nodes, weights)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss–Legendre en [-1, 1]"""
    nodes, weights = special.roots_legendre(n)
    return _frozen(nodes, weights)


def legendre_rule(n: int, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """Regla de Gauss–Legendre trasladada a [lo, hi]"""
    nodes, weights = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def jacobi_unit_rule(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Regla para ∫_0^1 x^a (1-x)^b g(x) dx.

    Devuelve nodos x en (0, 1) y pesos que ya incluyen el peso algebraico.
    """
    nodes, weights = gauss_jacobi(n, b, a)
    x = 0.5 * (1.0 + nodes)
    return x, weights * 2.0 ** (-(a + b + 1.0))


def algebraic_integral(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    left: float,
    right: float,
) -> float:
    """∫_lo^hi func(x) (x-lo)^left (hi-x)^right dx por QAWS"""
    value, _ = integrate.quad(
        func, lo, hi, weight="alg", wvar=(left, right),
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
    )
    return value


def circle_integral(func: Callable[[float], complex], exponent: float) -> complex:
    """
    ∫_{-π}^{π} func(θ) |2 sin(θ/2)|^exponent dθ/2π.

    La singularidad en θ = 0 queda en el peso algebraico; func debe ser
    suave en [-π, π].
    """
    def on_half(sign: float) -> complex:
        def smooth(theta: float) -> complex:
            # (2 sin(θ/2)/θ)^e es suave y positivo en [0, π]
            return func(sign * theta) * np.sinc(theta / (2.0 * np.pi)) ** exponent

        re = algebraic_integral(lambda t: float(np.real(smooth(t))), 0.0, np.pi, exponent, 0.0)
        im = algebraic_integral(lambda t: float(np.imag(smooth(t))), 0.0, np.pi, exponent, 0.0)
        return complex(re, im)

    return (on_half(1.0) + on_half(-1.0)) / (2.0 * np.pi)


def beta_integral(a: float, e: float) -> float:
    """∫_0^1 x^(a-1) (1-x)^e dx para a > 0, e > -1"""
    return algebraic_integral(lambda x: 1.0, 0.0, 1.0, a - 1.0, e)


def subtracted_beta_integral(a: float, e: float) -> float:
    """
    ∫_0^1 x^(a-1) ((1-x)^e - 1) dx + 1/a, válido para a > -1, a != 0.

    Para a > 0 coincide con B(a, e+1); para a < 0 es su continuación.
    """
    # [0, 1/2]: x^a · q(x) con q(x) = ((1-x)^e - 1)/x suave
    head = algebraic_integral(
        lambda x: np.expm1(e * np.log1p(-x)) / x if x > 0.0 else -e,
        0.0, 0.5, a, 0.0,
    )
    # [1/2, 1]: parte singular en x = 1 menos ∫ x^(a-1) exacta
    tail = algebraic_integral(lambda x: x ** (a - 1.0), 0.5, 1.0, 0.0, e)
    tail -= (1.0 - 0.5 ** a) / a
    return head + tail + 1.0 / a


def gamma_beta(a: float, b: float) -> float:
    """B(a, b) = Γ(a)Γ(b)/Γ(a+b), también para argumentos negativos no enteros"""
    return float(special.gamma(a) * special.gamma(b) * special.rgamma(a + b))
