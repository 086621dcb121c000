from typing import Any, Callable, Dict

import numpy as np
from loguru import logger

from app import __version__
from app.config import settings
from app.models.kernel import LimitKernel
from app.models.weight import WeightSpec
from app.schemas.results import ResultSet, ResultTable
from app.schemas.run_config import (
    AppendixParams,
    ColumnsParams,
    Command,
    GapParams,
    KernelParams,
    PhiParams,
    RunConfig,
    SampleParams,
    VerifyParams,
)
from app.services.appendix_service import AppendixService
from app.services.asymptotics_service import AsymptoticsService
from app.services.ensemble_service import EnsembleService
from app.services.fredholm_service import FredholmService
from app.services.kernel_service import KernelService
from app.services.opuc_service import OpucService
from app.services.toeplitz_service import ToeplitzService
from app.services.verification_service import VerificationService
from app.services.weight_service import WeightService

# Convenciones fijas que viajan en los metadatos
CONVENTIONS = {
    "c_normalization": "c1(0) = 1 (column predictions carry 1/c1(0), values at z=1 carry c1(0))",
    "h_convention": "h_m = 1/(T_m^-1)_{1,1} with dtheta/2pi",
    "kernel_measure": "K(u,v)/2pi on L2(I, du)",
}

# Desviación relativa admitida frente al límite v → u
DIAGONAL_REL_TOL = 1e-6


def _complex_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _limit_kernel(w: WeightSpec, gauge, apply_c_factor: bool) -> LimitKernel:
    d = WeightService.outer_factor(w, 8)
    c1_sq = float(abs(d.c1_at_1) ** 2)
    if apply_c_factor and not w.is_pure:
        logger.warning(f"Applying c(1) = |c1(1)|^2 = {c1_sq:.17g} in the kernel denominator")
    return LimitKernel.for_alpha(w.alpha, c1_at_1_sq=c1_sq, gauge=gauge, apply_c_factor=apply_c_factor)


class CommandService:

    @staticmethod
    def metadata(config: RunConfig, w: WeightSpec) -> Dict[str, Any]:
        return {
            "command": config.command.value,
            "alpha": w.alpha,
            "c": [_complex_pair(c) for c in w.c_fourier[w.m:]],
            "seed": config.seed,
            "version": __version__,
            **CONVENTIONS,
        }

    @staticmethod
    def run(config: RunConfig) -> ResultSet:
        """Ejecutar el comando de la configuración"""
        w = config.weight.to_weight()
        logger.info(f"Running {config.command.value} (alpha={w.alpha}, seed={config.seed})")
        handler = HANDLERS[config.command]
        tables, summary, extra = handler(w, config.params, config.seed)
        metadata = {**CommandService.metadata(config, w), **extra}
        return ResultSet(command=config.command, metadata=metadata, tables=tables, summary=summary)

    @staticmethod
    def columns(w: WeightSpec, params: ColumnsParams, seed: int):
        p = ToeplitzService.levinson_first_column(w, params.n)
        last = ToeplitzService.last_column_via_symmetry(p)
        d = VerificationService.outer_data(w, params.ks)
        columns = {params.n: p}
        raw = ResultTable(
            name="columns",
            columns=["k", "first_re", "first_im", "last_re", "last_im"],
            rows=[[k, *_complex_pair(p.first_col[k]), *_complex_pair(last[k])] for k in range(params.n + 1)],
        )
        predictions = [
            VerificationService.edge_table(d, columns, params.ks),
            VerificationService.far_edge_table(d, columns, params.ks),
            VerificationService.bulk_table(d, columns, params.xs),
        ]
        predicted, exact, deviation = AsymptoticsService.norm_relation(d, params.n, p.norm11)
        summary = {
            "n": params.n,
            "norm11": p.norm11,
            "norm_relation_predicted": predicted,
            "norm_relation_rel_dev": deviation,
            "c1_at_1": _complex_pair(d.c1_at_1),
        }
        return [raw, *predictions], summary, {}

    @staticmethod
    def phi(w: WeightSpec, params: PhiParams, seed: int):
        p = ToeplitzService.levinson_first_column(w, params.n)
        pair = OpucService.build_pair(p, w, params.normalization)
        coefficients = ResultTable(
            name="coefficients",
            columns=["k", "phi_star_re", "phi_star_im", "phi_re", "phi_im"],
            rows=[
                [k, *_complex_pair(pair.phi_star_coeffs[k]), *_complex_pair(pair.phi_coeffs[k])]
                for k in range(params.n + 1)
            ],
        )
        recursion = ResultTable(
            name="verblunsky",
            columns=["index", "gamma_re", "gamma_im", "h"],
            rows=[[m, *_complex_pair(p.verblunsky[m]), float(p.norms[m])] for m in range(params.n)],
        )
        tables = [coefficients, recursion]
        if params.n >= 1:
            d = VerificationService.outer_data(w)
            tables += VerificationService.at_one_tables(w, d, {params.n: p}, range(params.j_max + 1))
        return tables, {"n": params.n, "h": pair.h}, {"normalization": params.normalization.value}

    @staticmethod
    def verify_theorems(w: WeightSpec, params: VerifyParams, seed: int):
        d = VerificationService.outer_data(w, params.ks)
        columns = VerificationService.columns_by_n(w, params.n_values)
        tables = [
            VerificationService.edge_table(d, columns, params.ks),
            VerificationService.far_edge_table(d, columns, params.ks),
            VerificationService.bulk_table(d, columns, params.xs),
            *VerificationService.corollary_tables(d, columns, params.ks, params.xs),
            *VerificationService.at_one_tables(w, d, columns, params.js),
            VerificationService.norm_relation_table(d, columns),
        ]
        alphas = np.linspace(-0.45, 0.45, 20)
        tables.append(VerificationService.beta_identity_table(alphas, params.js))
        summary = VerificationService.summarize(tables)

        if w.alpha != 0.0:
            k = _limit_kernel(w, "proof", False)
            kernel_table = VerificationService.kernel_limit_table(w, k, params.n_values, params.kernel_pairs)
            tables.append(kernel_table)
            summary.update(VerificationService.summarize([kernel_table]))
            report = FredholmService.shrinking_scaling(k, (0.5, 3.0), 2, params.shrinking_n_values)
            tables.append(ResultTable(
                name="shrinking_interval",
                columns=["n", "probability_at_least_one", "probability_zero"],
                rows=[
                    [n, prob, zero]
                    for n, prob, zero in zip(report.n_values, report.probabilities, report.zero_count_probabilities)
                ],
            ))
            summary.update({
                "shrinking.slope": report.slope,
                "shrinking.predicted_slope": report.predicted_slope,
                "shrinking.bound_slope": report.bound_slope,
            })
        return tables, summary, {"kernel_pairs": [list(p) for p in params.kernel_pairs]}

    @staticmethod
    def kernel(w: WeightSpec, params: KernelParams, seed: int):
        k = _limit_kernel(w, params.gauge, params.apply_c_factor)
        grid = np.linspace(params.u_min, params.u_max, params.points)
        matrix = KernelService.kernel_matrix(k, grid, grid)
        values = ResultTable(
            name="kernel",
            columns=["u", "v", "re", "im"],
            rows=[
                [float(u), float(v), *_complex_pair(matrix[i, j])]
                for i, u in enumerate(grid) for j, v in enumerate(grid)
            ],
        )
        variants = [KernelService.diagonal_variants(k, float(u)) for u in grid]
        names = ("analytic", "modulus_minus_cross", "cross_only")
        diagonal = ResultTable(
            name="diagonal",
            columns=["u", "limit", *names],
            rows=[[float(u), v["limit"], *(v[name] for name in names)] for u, v in zip(grid, variants)],
        )
        defects = {
            name: float(max(abs(v[name] - v["limit"]) / max(abs(v["limit"]), 1e-300) for v in variants))
            for name in names
        }
        closest = min(names[1:], key=defects.get)
        if defects["analytic"] > DIAGONAL_REL_TOL:
            logger.warning(f"Analytic diagonal deviates from the v -> u limit by {defects['analytic']:.2e}")
        if defects[closest] > DIAGONAL_REL_TOL:
            logger.warning(f"No printed diagonal matches the v -> u limit (closest: {closest})")
        extra = {
            "branch": k.branch.value,
            "gauge": k.gauge.value,
            "apply_c_factor": k.apply_c_factor,
            "c1_at_1_sq": k.c1_at_1_sq,
        }
        return [values, diagonal], {"diagonal_variant_defects": defects, "matching_diagonal": closest}, extra

    @staticmethod
    def gap(w: WeightSpec, params: GapParams, seed: int):
        k = _limit_kernel(w, params.gauge, False)
        op = FredholmService.discretize(k, params.interval, params.nodes)
        distribution = FredholmService.counting_distribution(op, params.m_max)
        table = ResultTable(
            name="probabilities",
            columns=["m", "probability"],
            rows=[[p.m, p.value] for p in distribution],
        )
        summary = {
            "interval": list(params.interval),
            "alpha": w.alpha,
            "probabilities": [p.value for p in distribution],
            "trace": op.trace,
            "det": FredholmService.det_gamma(op, 1.0),
            "det_direct": FredholmService.det_direct(op, 1.0),
            "extrapolated": op.extrapolated,
            "regularized": any(p.regularized for p in distribution),
        }
        if params.nodes * 2 <= settings.nystrom_max_nodes:
            summary["self_convergence"] = FredholmService.self_convergence(k, params.interval, params.nodes)
        return [table], summary, {"branch": k.branch.value, "gauge": k.gauge.value, "nodes": params.nodes}

    @staticmethod
    def sample(w: WeightSpec, params: SampleParams, seed: int):
        if params.method.value == "mcmc":
            stream = EnsembleService.sample_mcmc(w, params.n, params.samples, seed)
        else:
            stream = EnsembleService.sample_dpp_stream(w, params.n, params.samples, params.grid_size, seed)
        estimate = EnsembleService.counting_statistics(stream, params.interval, params.scale)
        m_range = range(min(params.m_max, params.n) + 1)

        fredholm = [float("nan")] * len(m_range)
        if params.scale == 1.0 and w.alpha != 0.0 and params.interval[0] != params.interval[1]:
            op = FredholmService.discretize(_limit_kernel(w, "proof", False), params.interval)
            fredholm = [p.value for p in FredholmService.counting_distribution(op, len(m_range) - 1)]

        table = ResultTable(
            name="histogram",
            columns=["m", "count", "probability", "std_error", "fredholm"],
            rows=[
                [m, int(estimate.counts[m]), estimate.probability(m), estimate.std_error(m), fredholm[m]]
                for m in m_range
            ],
        )
        return [table], {"diagnostics": stream.diagnostics.model_dump(mode="json")}, {
            "method": params.method.value, "scale": params.scale, "interval": list(params.interval),
        }

    @staticmethod
    def appendix(w: WeightSpec, params: AppendixParams, seed: int):
        tables, summary = [], {}
        for alpha in params.alpha_values:
            table, stats = AppendixService.run_appendix_table(
                alpha, params.n_min, params.n_max, params.step, w.c_fourier
            )
            tables.append(table)
            summary[table.name] = stats
        return tables, summary, {"appendix_weight": "pure" if w.is_pure else "custom c"}


HANDLERS: Dict[Command, Callable] = {
    Command.COLUMNS: CommandService.columns,
    Command.PHI: CommandService.phi,
    Command.VERIFY_THEOREMS: CommandService.verify_theorems,
    Command.KERNEL: CommandService.kernel,
    Command.GAP: CommandService.gap,
    Command.SAMPLE: CommandService.sample,
    Command.APPENDIX: CommandService.appendix,
}
