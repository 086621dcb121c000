"""
Determinantes de Fredholm det(Id - γK) sobre L²(I) por Nyström y
probabilidades de conteo a partir de los autovalores.

El operador del núcleo límite es K(u, v)/2π (densidades respecto de du/2π).
Un núcleo sintético (callable) se usa tal cual.
"""
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as P
from scipy import linalg, stats

from app.config import settings
from app.core.exceptions import (
    DecayNotMonotoneException,
    InvalidIntervalException,
    ValidationException,
)
from app.core.quadrature import legendre_rule
from app.models.fredholm import CountingProbability, DiscretizedOperator, ShrinkingScalingReport
from app.models.kernel import LimitKernel
from app.services.kernel_service import KernelService

KernelLike = Union[LimitKernel, Callable[[np.ndarray, np.ndarray], np.ndarray]]

MAX_COUNT = 12
TRACE_TERMS = 30
HERMITIAN_TOL = 1e-12


def _evaluate(kernel: KernelLike, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if isinstance(kernel, LimitKernel):
        return KernelService.kernel_matrix(kernel, x, y) / (2.0 * np.pi)
    return np.asarray(kernel(x, y), dtype=complex)


def _pieces(interval: Tuple[float, float]) -> Tuple[List[Tuple[float, float]], bool]:
    u, v = interval
    clip = settings.interval_clip
    if u < 0.0 < v:
        return [(u, -clip), (clip, v)], True
    if u == 0.0:
        u = clip
    if v == 0.0:
        v = -clip
    if u >= v:
        raise InvalidIntervalException(f"interval [{interval[0]}, {interval[1]}] collapses after clipping at 0")
    return [(u, v)], False


class FredholmService:

    @staticmethod
    def discretize(
        kernel: KernelLike,
        interval: Tuple[float, float],
        n_nodes: int = None,
        avoid_origin: bool = None,
    ) -> DiscretizedOperator:
        """
        Nyström simétrico: matriz √w_i K(x_i, x_j) √w_j y su espectro.

        Un intervalo que contiene 0 se parte en [u, -ε] ∪ [ε, v] con
        n_nodes nodos por trozo (suma directa de reglas, matriz completa).
        """
        n_nodes = n_nodes or settings.nystrom_default_nodes
        if not settings.nystrom_min_nodes <= n_nodes <= settings.nystrom_max_nodes:
            raise ValidationException(
                f"n_nodes={n_nodes} outside [{settings.nystrom_min_nodes}, {settings.nystrom_max_nodes}]"
            )
        u, v = float(interval[0]), float(interval[1])
        if not (np.isfinite(u) and np.isfinite(v)) or u > v:
            raise InvalidIntervalException(f"interval [{u}, {v}] must be finite with u <= v")

        if u == v:
            empty = np.zeros(0)
            return DiscretizedOperator(
                nodes=empty, weights=empty, matrix=np.zeros((0, 0), dtype=complex),
                eigenvalues=np.zeros(0), interval=(u, v),
            )

        # Los núcleos sintéticos no tienen singularidad en 0
        if avoid_origin is None:
            avoid_origin = isinstance(kernel, LimitKernel)
        if avoid_origin:
            pieces, extrapolated = _pieces((u, v))
        else:
            pieces, extrapolated = [(u, v)], False
        if extrapolated:
            logger.warning(f"Interval [{u}, {v}] straddles 0; split into {pieces}, result is an extrapolation")

        rules = [legendre_rule(n_nodes, lo, hi) for lo, hi in pieces]
        nodes = np.concatenate([r[0] for r in rules])
        weights = np.concatenate([r[1] for r in rules])
        root = np.sqrt(weights)
        matrix = root[:, None] * _evaluate(kernel, nodes, nodes) * root[None, :]

        hermitian = bool(np.allclose(matrix, matrix.conj().T, atol=HERMITIAN_TOL * max(1.0, np.abs(matrix).max())))
        if hermitian:
            matrix = 0.5 * (matrix + matrix.conj().T)
            eigenvalues = linalg.eigvalsh(matrix)
        else:
            eigenvalues = linalg.eigvals(matrix)

        return DiscretizedOperator(
            nodes=nodes, weights=weights, matrix=matrix, eigenvalues=eigenvalues,
            interval=(u, v), hermitian=hermitian, extrapolated=extrapolated,
        )

    @staticmethod
    def det_gamma(op: DiscretizedOperator, gamma: float) -> float:
        """det(Id - γK) = Π(1 - γλ_i)"""
        if op.size == 0:
            return 1.0
        return float(np.real(np.prod(1.0 - gamma * op.eigenvalues)))

    @staticmethod
    def det_direct(op: DiscretizedOperator, gamma: float) -> float:
        """det(Id - γA) por LU"""
        if op.size == 0:
            return 1.0
        return float(np.real(linalg.det(np.eye(op.size) - gamma * op.matrix)))

    @staticmethod
    def det_trace_expansion(op: DiscretizedOperator, gamma: float, terms: int = TRACE_TERMS) -> float:
        """exp(-Σ_{m<=terms} γ^m Tr(A^m)/m), válido para ‖γA‖ < 1/2"""
        if op.size == 0:
            return 1.0
        scaled = gamma * op.matrix
        norm = float(np.linalg.norm(scaled, 2))
        if norm >= 0.5:
            raise ValidationException(f"trace expansion needs ||gamma A|| < 0.5, got {norm:.3f}")
        power = np.eye(op.size, dtype=complex)
        log_det = 0j
        for m in range(1, terms + 1):
            power = power @ scaled
            log_det -= np.trace(power) / m
        return float(np.real(np.exp(log_det)))

    @staticmethod
    def chebyshev_defect(op: DiscretizedOperator, points: int = 8) -> float:
        """max |Π(1-γλ) - det(Id-γA)| en nodos de Chebyshev de [0, 1]"""
        gammas = 0.5 * (1.0 + np.cos(np.pi * (np.arange(points) + 0.5) / points))
        return float(max(
            abs(FredholmService.det_gamma(op, g) - FredholmService.det_direct(op, g)) for g in gammas
        ))

    @staticmethod
    def self_convergence(kernel: KernelLike, interval: Tuple[float, float], n_nodes: int) -> float:
        """|det(Id-K)| con n y 2n nodos"""
        coarse = FredholmService.discretize(kernel, interval, n_nodes)
        fine = FredholmService.discretize(kernel, interval, 2 * n_nodes)
        return abs(FredholmService.det_gamma(coarse, 1.0) - FredholmService.det_gamma(fine, 1.0))

    @staticmethod
    def counting_distribution(op: DiscretizedOperator, m_max: int) -> List[CountingProbability]:
        """
        P(m) = ((-1)^m/m!) ∂_γ^m det(Id - γK) en γ = 1, m = 0..m_max.

        Es el coeficiente de t^m en Π(1 - λ_i + λ_i t), que se obtiene como
        e_m(λ/(1-λ)) Π(1-λ). Si algún λ está a menos de eigenvalue_one_tol
        de 1 se multiplica el polinomio directamente.
        """
        if m_max < 0 or m_max > MAX_COUNT:
            raise ValidationException(f"m={m_max} must lie in [0, {MAX_COUNT}]")
        lam = np.real(op.eigenvalues) if op.hermitian else op.eigenvalues
        regularized = bool(np.any(np.abs(1.0 - lam) < settings.eigenvalue_one_tol))

        if op.size == 0:
            coefficients = np.zeros(m_max + 1)
            coefficients[0] = 1.0
        elif regularized:
            logger.warning("Eigenvalue within tolerance of 1; using the regularized product path")
            poly = np.ones(1, dtype=lam.dtype)
            for value in lam:
                poly = P.polymul(poly, [1.0 - value, value])[: m_max + 1]
            coefficients = np.zeros(m_max + 1, dtype=lam.dtype)
            coefficients[: poly.size] = poly
        else:
            ratio = lam / (1.0 - lam)
            esym = np.zeros(m_max + 1, dtype=lam.dtype)
            esym[0] = 1.0
            for mu in ratio:
                esym[1:] = esym[1:] + mu * esym[:-1]
            coefficients = esym * np.prod(1.0 - lam)

        return [
            CountingProbability(interval=op.interval, m=m, value=float(np.real(c)), regularized=regularized)
            for m, c in enumerate(coefficients)
        ]

    @staticmethod
    def counting_probability(op: DiscretizedOperator, m: int) -> CountingProbability:
        """P(F[I] = m)"""
        return FredholmService.counting_distribution(op, m)[m]

    @staticmethod
    def at_least_one(op: DiscretizedOperator) -> float:
        """P(F[I] >= 1) = 1 - det(Id - K) sin cancelación"""
        if op.size == 0:
            return 0.0
        lam = np.real(op.eigenvalues)
        return float(-np.expm1(np.sum(np.log1p(-lam))))

    @staticmethod
    def shrinking_scaling(
        k: LimitKernel,
        base_interval: Tuple[float, float],
        p: int,
        n_grid: Sequence[int],
        m: int = 1,
        n_nodes: int = None,
    ) -> ShrinkingScalingReport:
        """
        Probabilidades de conteo sobre base_interval / N^{p-1} en el
        argumento del núcleo y pendiente log-log frente a N.

        Con m = 1 se ajusta P(F >= 1); con m >= 2, P(F = m).
        """
        if p < 2:
            raise ValidationException(f"p={p} must be >= 2")
        if m < 1:
            raise ValidationException(f"m={m} must be >= 1")
        if len(n_grid) < 2:
            raise ValidationException("n_grid needs at least two sizes")
        n_values = sorted(int(n) for n in n_grid)
        logger.info(f"Shrinking-interval scaling: alpha={k.alpha}, p={p}, m={m}, N={n_values}")

        probabilities, zero_counts = [], []
        for n in n_values:
            shrink = float(n) ** (p - 1)
            op = FredholmService.discretize(k, (base_interval[0] / shrink, base_interval[1] / shrink), n_nodes)
            if m == 1:
                probabilities.append(FredholmService.at_least_one(op))
            else:
                probabilities.append(FredholmService.counting_probability(op, m).value)
            zero_counts.append(FredholmService.det_gamma(op, 1.0))

        if any(b >= a for a, b in zip(probabilities, probabilities[1:])) or min(probabilities) <= 0.0:
            raise DecayNotMonotoneException(n_values, probabilities)

        fit = stats.linregress(np.log(n_values), np.log(probabilities))
        return ShrinkingScalingReport(
            alpha=k.alpha, p=p, m=m, base_interval=tuple(base_interval),
            n_values=n_values, probabilities=probabilities,
            slope=float(fit.slope), intercept=float(fit.intercept), r_value=float(fit.rvalue),
            predicted_slope=(1 - p) * (m * (1.0 + 2.0 * k.alpha) + m * (m - 1)),
            bound_slope=float(1 - p),
            zero_count_probabilities=zero_counts,
        )
