"""
Muestreo del ensemble circular generalizado

    P_N(θ) ∝ Π f(e^{iθ_j}) Π_{j<i} |e^{iθ_j} - e^{iθ_i}|²

con dos muestreadores independientes: Metropolis-within-Gibbs vectorizado
sobre cadenas y un DPP de proyección exacto sobre una malla refinada en
θ = 0. Ambos usan Philox con semillas derivadas por SeedSequence.spawn, un
generador por lote; los lotes corren en un ThreadPoolExecutor y se
concatenan en orden de lote.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import linalg, stats

from app.config import settings
from app.core.exceptions import (
    DecayNotMonotoneException,
    GridTooCoarseException,
    InvalidIntervalException,
    ValidationException,
)
from app.core.quadrature import legendre_rule
from app.models.ensemble import (
    CountingEstimate,
    EnsembleSample,
    IntensityHistogram,
    SampleStream,
    SamplerDiagnostics,
    SamplerMethod,
)
from app.models.fredholm import ShrinkingScalingReport
from app.models.kernel import LimitKernel
from app.models.weight import WeightSpec
from app.services.kernel_service import KernelService
from app.services.opuc_service import OpucService
from app.services.toeplitz_service import ToeplitzService
from app.services.weight_service import WeightService

Samples = Union[SampleStream, np.ndarray]

ADAPT_EVERY = 25
PILOT_SWEEPS = 200
SOKAL_WINDOW = 5.0
DPP_DRAWS_PER_BATCH = 256
MIN_GRID = 512


def wrap_angle(theta: np.ndarray) -> np.ndarray:
    """Representante en (-π, π]"""
    return np.pi - np.mod(np.pi - theta, 2.0 * np.pi)


def _generators(seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(count)]


def _batches(total: int, size: int) -> List[int]:
    full, rest = divmod(total, size)
    return [size] * full + ([rest] if rest else [])


def integrated_autocorrelation_time(series: np.ndarray, window: float = SOKAL_WINDOW) -> float:
    """
    τ = 1 + 2 Σ_{t<=M} ρ(t) con la ventana automática de Sokal (M >= window·τ).

    series: (steps,) o (chains, steps); la autocorrelación se promedia
    entre cadenas.
    """
    x = np.atleast_2d(np.asarray(series, dtype=float))
    steps = x.shape[1]
    if steps < 2:
        return 1.0
    centered = x - x.mean(axis=1, keepdims=True)
    size = 1 << int(np.ceil(np.log2(2 * steps)))
    spectrum = np.fft.rfft(centered, n=size, axis=1)
    acf = np.fft.irfft(spectrum * np.conj(spectrum), n=size, axis=1)[:, :steps].mean(axis=0)
    if acf[0] <= 0.0:
        return 1.0
    taus = 2.0 * np.cumsum(acf / acf[0]) - 1.0
    inside = np.arange(steps) >= window * taus
    cut = int(np.argmax(inside)) if np.any(inside) else steps - 1
    return float(taus[cut])


def _log_pair(diff: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(2.0 * np.sin(0.5 * diff)))


class _ChainBatch:
    """Grupo de cadenas con un único generador"""

    def __init__(self, w: WeightSpec, n: int, chains: int, rng: np.random.Generator):
        self.w = w
        self.n = n
        self.rng = rng
        base = -np.pi + 2.0 * np.pi * (np.arange(n) + 0.5) / n
        jitter = rng.uniform(-0.25, 0.25, size=(chains, n)) * (2.0 * np.pi / n)
        self.theta = wrap_angle(base[None, :] + jitter)
        self.step = min(np.pi, 2.0 * np.pi / n)
        self.accepted = 0
        self.proposed = 0

    def _delta(self, j: int, proposal: np.ndarray) -> np.ndarray:
        current = self.theta[:, j]
        delta = WeightService.log_weight(self.w, proposal) - WeightService.log_weight(self.w, current)
        if self.n > 1:
            others = np.delete(self.theta, j, axis=1)
            delta = delta + 2.0 * np.sum(
                _log_pair(proposal[:, None] - others) - _log_pair(current[:, None] - others), axis=1
            )
        return delta

    def sweep(self) -> None:
        chains = self.theta.shape[0]
        for j in range(self.n):
            proposal = wrap_angle(self.theta[:, j] + self.step * self.rng.standard_normal(chains))
            delta = self._delta(j, proposal)
            # Colisiones y θ = 0 con α < 0 dan delta no finito: se rechazan
            accept = np.isfinite(delta) & (np.log(self.rng.random(chains)) < delta)
            self.theta[:, j] = np.where(accept, proposal, self.theta[:, j])
            self.accepted += int(np.count_nonzero(accept))
            self.proposed += chains

    def reset_counters(self) -> None:
        self.accepted = 0
        self.proposed = 0

    @property
    def acceptance(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def statistic(self) -> np.ndarray:
        return np.sum(np.cos(self.theta), axis=1)


def _run_chain_batch(
    w: WeightSpec, n: int, chains: int, records: int, burn_in: int, rng: np.random.Generator
) -> Tuple[np.ndarray, dict]:
    batch = _ChainBatch(w, n, chains, rng)

    for sweep in range(1, burn_in + 1):
        batch.sweep()
        if sweep % ADAPT_EVERY == 0:
            batch.step = float(np.clip(
                batch.step * np.exp(batch.acceptance - settings.mcmc_target_acceptance), 1e-4, np.pi
            ))
            batch.reset_counters()

    pilot = np.empty((chains, PILOT_SWEEPS))
    for t in range(PILOT_SWEEPS):
        batch.sweep()
        pilot[:, t] = batch.statistic()
    tau = integrated_autocorrelation_time(pilot)
    thinning = int(min(settings.mcmc_max_thinning, max(1, np.ceil(tau))))

    batch.reset_counters()
    draws = np.empty((records, chains, n))
    trace = np.empty((chains, records * thinning))
    for r in range(records):
        for t in range(thinning):
            batch.sweep()
            trace[:, r * thinning + t] = batch.statistic()
        draws[r] = batch.theta
    return draws, {
        "acceptance": batch.acceptance,
        "step": batch.step,
        "tau": integrated_autocorrelation_time(trace),
        "thinning": thinning,
    }


def _even_grid(grid_size: int) -> int:
    """Número par de celdas: θ = 0 queda en un borde, nunca en un centro"""
    if grid_size % 2:
        logger.warning(f"grid_size={grid_size} is odd; using {grid_size + 1} cells")
        return grid_size + 1
    return grid_size


def _projection_features(w: WeightSpec, n: int, grid_size: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Celdas θ refinadas hacia 0 y filas ortonormales Q (G × n) con
    K_N(θ_g, θ_h) Δ ≈ Q_g · conj(Q_h).

    Resolución: la fase (n-1)·Δθ del polinomio de mayor grado en la celda
    más ancha no supera dpp_max_cell_phase.
    """
    t = np.linspace(-1.0, 1.0, grid_size + 1)
    edges = np.pi * np.sign(t) * np.abs(t) ** settings.dpp_grid_power
    centers = 0.5 * (edges[1:] + edges[:-1])
    widths = np.diff(edges)
    cell_weights = widths / (2.0 * np.pi)

    cell_phase = float((n - 1) * np.max(widths))
    if cell_phase > settings.dpp_max_cell_phase:
        raise GridTooCoarseException(grid_size, n, cell_phase, measure="cell_phase")

    column = ToeplitzService.levinson_first_column(w, n)
    phi, _ = OpucService.family_values(column.verblunsky, np.exp(1j * centers), n)
    density = cell_weights * WeightService.weight_eval(w, centers)
    if not np.all(np.isfinite(density)):
        raise GridTooCoarseException(grid_size, n, float("inf"), measure="density")
    features = np.sqrt(density)[:, None] * phi.T / np.sqrt(column.norms[:n])[None, :]

    gram = features.conj().T @ features
    deviation = float(np.max(np.abs(gram - np.eye(n))))
    if not deviation <= settings.dpp_gram_tol:
        raise GridTooCoarseException(grid_size, n, deviation)
    q, r = linalg.qr(features, mode="economic")
    if np.min(np.abs(np.diag(r))) < settings.dpp_rank_tol:
        raise GridTooCoarseException(grid_size, n, deviation, measure="rank")
    return edges, q, deviation


def _draw_cells(q: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Regla de la cadena del DPP de proyección con normas residuales"""
    grid, n = q.shape
    residual = np.sum(np.abs(q) ** 2, axis=1)
    basis = np.zeros((n, n), dtype=complex)
    cells = np.empty(n, dtype=int)
    for i in range(n):
        cumulative = np.cumsum(np.clip(residual, 0.0, None))
        g = min(int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")), grid - 1)
        cells[i] = g
        vector = q[g].copy()
        for _ in range(2):
            vector -= basis[:i].T @ (basis[:i].conj() @ vector)
        vector /= np.linalg.norm(vector)
        basis[i] = vector
        residual -= np.abs(q @ vector.conj()) ** 2
    return cells


def _run_dpp_batch(edges: np.ndarray, q: np.ndarray, draws: int, rng: np.random.Generator) -> np.ndarray:
    widths = np.diff(edges)
    out = np.empty((draws, q.shape[1]))
    for s in range(draws):
        cells = _draw_cells(q, rng)
        thetas = wrap_angle(edges[cells] + rng.random(cells.size) * widths[cells])
        out[s] = np.sort(thetas)
    return out


class EnsembleService:

    @staticmethod
    def sample_mcmc(
        w: WeightSpec,
        n: int,
        n_samples: int,
        seed: Optional[int] = None,
        chains: Optional[int] = None,
        burn_in: Optional[int] = None,
    ) -> SampleStream:
        """
        Metropolis-within-Gibbs sobre log Σ log f(θ_j) + 2Σ_{j<i} log|2 sin((θ_j-θ_i)/2)|.

        El aclarado es min(mcmc_max_thinning, ⌈τ⌉) con τ medido en una fase
        piloto sobre Σ cos θ_j.
        """
        if not 1 <= n <= settings.dpp_max_n:
            raise ValidationException(f"n={n} must lie in [1, {settings.dpp_max_n}]")
        if n_samples < 1:
            raise ValidationException("n_samples must be >= 1")
        seed = settings.default_seed if seed is None else seed
        chains = chains or settings.mcmc_chains
        burn_in = settings.mcmc_burn_in if burn_in is None else burn_in
        groups = [g.size for g in np.array_split(np.arange(chains), min(chains, settings.mcmc_workers))]
        records = int(np.ceil(n_samples / chains))
        rngs = _generators(seed, len(groups))
        logger.info(f"MCMC sampling: n={n}, samples={n_samples}, chains={chains}, seed={seed}")

        with ThreadPoolExecutor(max_workers=settings.mcmc_workers) as pool:
            results = list(pool.map(
                lambda args: _run_chain_batch(w, n, args[0], records, burn_in, args[1]),
                zip(groups, rngs),
            ))

        draws = np.concatenate([r[0] for r in results], axis=1).reshape(-1, n)[:n_samples]
        weights = np.array(groups, dtype=float) / chains
        tau = float(max(r[1]["tau"] for r in results))
        thinning = int(min(r[1]["thinning"] for r in results))
        diagnostics = SamplerDiagnostics(
            method=SamplerMethod.MCMC, seed=seed, n=n, n_samples=n_samples,
            acceptance_rate=float(np.sum(weights * [r[1]["acceptance"] for r in results])),
            step_size=float(np.mean([r[1]["step"] for r in results])),
            autocorrelation_time=tau,
            thinning=thinning,
            effective_sample_size=n_samples / max(1.0, tau / thinning),
            chains=chains,
        )
        logger.info(
            f"MCMC done: acceptance={diagnostics.acceptance_rate:.3f}, tau={tau:.2f}, thinning={thinning}"
        )
        return SampleStream(thetas=np.sort(draws, axis=1), diagnostics=diagnostics)

    @staticmethod
    def sample_dpp_stream(
        w: WeightSpec,
        n: int,
        n_samples: int,
        grid_size: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> SampleStream:
        """Extracciones exactas del DPP de proyección de rango n sobre la malla"""
        grid_size = grid_size or settings.dpp_grid_size
        if not 1 <= n <= settings.dpp_max_n:
            raise ValidationException(f"n={n} must lie in [1, {settings.dpp_max_n}]")
        if grid_size < MIN_GRID:
            raise ValidationException(f"grid_size={grid_size} must be >= {MIN_GRID}")
        if n_samples < 1:
            raise ValidationException("n_samples must be >= 1")
        grid_size = _even_grid(grid_size)
        seed = settings.default_seed if seed is None else seed
        logger.info(f"DPP sampling: n={n}, samples={n_samples}, grid={grid_size}, seed={seed}")

        edges, q, deviation = _projection_features(w, n, grid_size)
        sizes = _batches(n_samples, DPP_DRAWS_PER_BATCH)
        rngs = _generators(seed, len(sizes))
        with ThreadPoolExecutor(max_workers=settings.mcmc_workers) as pool:
            parts = list(pool.map(lambda args: _run_dpp_batch(edges, q, args[0], args[1]), zip(sizes, rngs)))

        diagnostics = SamplerDiagnostics(
            method=SamplerMethod.DPP, seed=seed, n=n, n_samples=n_samples,
            effective_sample_size=float(n_samples), grid_size=grid_size, gram_deviation=deviation,
        )
        return SampleStream(thetas=np.concatenate(parts, axis=0), diagnostics=diagnostics)

    @staticmethod
    def sample_dpp(
        w: WeightSpec, n: int, grid_size: Optional[int] = None, seed: Optional[int] = None
    ) -> EnsembleSample:
        """Una extracción del DPP de proyección"""
        stream = EnsembleService.sample_dpp_stream(w, n, 1, grid_size, seed)
        return next(iter(stream))

    @staticmethod
    def counting_statistics(samples: Samples, interval: Tuple[float, float], q: float) -> CountingEstimate:
        """Histograma de #{i : θ_i ∈ [u/N^q, v/N^q]}"""
        thetas = samples.thetas if isinstance(samples, SampleStream) else np.atleast_2d(samples)
        u, v = float(interval[0]), float(interval[1])
        if u > v:
            raise InvalidIntervalException(f"interval [{u}, {v}] must satisfy u <= v")
        n = thetas.shape[1]
        scale = float(n) ** q
        lo, hi = u / scale, v / scale
        if lo < -np.pi or hi > np.pi:
            raise InvalidIntervalException(f"scaled interval [{lo}, {hi}] leaves [-pi, pi]")
        per_sample = np.count_nonzero((thetas >= lo) & (thetas <= hi), axis=1)
        return CountingEstimate(
            interval=(u, v), scale_exponent=q,
            counts=np.bincount(per_sample, minlength=n + 1), n_samples=thetas.shape[0],
        )

    @staticmethod
    def intensity_histogram(
        samples: Samples, edges: Sequence[float], k: Optional[LimitKernel] = None, nodes: int = 16
    ) -> IntensityHistogram:
        """
        Densidad de Nθ por unidad de u en cada celda, con su error estándar,
        frente a la media de K(u,u)/2π en la celda.
        """
        thetas = samples.thetas if isinstance(samples, SampleStream) else np.atleast_2d(samples)
        edges = np.asarray(edges, dtype=float)
        n_samples, n = thetas.shape
        scaled = n * thetas
        widths = np.diff(edges)
        per_sample = np.stack(
            [np.count_nonzero((scaled >= lo) & (scaled < hi), axis=1) for lo, hi in zip(edges[:-1], edges[1:])],
            axis=1,
        ).astype(float)
        density = per_sample.mean(axis=0) / widths
        spread = per_sample.std(axis=0, ddof=1) if n_samples > 1 else np.zeros(widths.size)
        std_errors = spread / np.sqrt(n_samples) / widths

        predicted = np.full(widths.size, np.nan)
        if k is not None:
            for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
                x, wq = legendre_rule(nodes, lo, hi)
                predicted[b] = float(np.sum(wq * KernelService.diagonal(k, x))) / (hi - lo) / (2.0 * np.pi)
        return IntensityHistogram(
            edges=edges, density=density, std_errors=std_errors, predicted=predicted, n_samples=n_samples
        )

    @staticmethod
    def spacing_poisson_pvalue(samples: Samples) -> float:
        """p-valor KS de las separaciones entre vecinos (reescaladas a media 1) frente a Exp(1)"""
        thetas = samples.thetas if isinstance(samples, SampleStream) else np.atleast_2d(samples)
        n = thetas.shape[1]
        closed = np.concatenate([thetas, thetas[:, :1] + 2.0 * np.pi], axis=1)
        spacings = (np.diff(closed, axis=1) * n / (2.0 * np.pi)).ravel()
        return float(stats.kstest(spacings, "expon").pvalue)

    @staticmethod
    def shrinking_decay(
        w: WeightSpec,
        n_values: Sequence[int],
        base_interval: Tuple[float, float],
        p: int,
        n_samples: int,
        seed: Optional[int] = None,
        method: SamplerMethod = SamplerMethod.DPP,
        grid_size: Optional[int] = None,
    ) -> ShrinkingScalingReport:
        """P̂(F_N[u/N^p, v/N^p] >= 1) frente a N y su pendiente log-log"""
        if p < 2:
            raise ValidationException(f"p={p} must be >= 2")
        seed = settings.default_seed if seed is None else seed
        n_values = sorted(int(n) for n in n_values)
        probabilities = []
        for index, n in enumerate(n_values):
            if method == SamplerMethod.DPP:
                stream = EnsembleService.sample_dpp_stream(w, n, n_samples, grid_size, seed + index)
            else:
                stream = EnsembleService.sample_mcmc(w, n, n_samples, seed + index)
            estimate = EnsembleService.counting_statistics(stream, base_interval, p)
            probabilities.append(1.0 - estimate.probability(0))

        if any(b >= a for a, b in zip(probabilities, probabilities[1:])) or min(probabilities) <= 0.0:
            raise DecayNotMonotoneException(n_values, probabilities)
        fit = stats.linregress(np.log(n_values), np.log(probabilities))
        return ShrinkingScalingReport(
            alpha=w.alpha, p=p, m=1, base_interval=tuple(base_interval),
            n_values=n_values, probabilities=probabilities,
            slope=float(fit.slope), intercept=float(fit.intercept), r_value=float(fit.rvalue),
            predicted_slope=(1 - p) * (1.0 + 2.0 * w.alpha), bound_slope=float(1 - p),
        )
