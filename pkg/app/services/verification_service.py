"""
Barridos de verificación: valores exactos (Levinson) frente a las
predicciones asintóticas, con órdenes estimados entre N sucesivos.

Todas las tablas de comparación comparten THEOREM_COLUMNS.
"""
from collections import defaultdict
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from app.core.exceptions import IndexOutOfRangeException
from app.models.kernel import LimitKernel
from app.models.opuc import Normalization
from app.models.toeplitz import PredictorColumn
from app.models.weight import OuterData, WeightSpec
from app.schemas.results import THEOREM_COLUMNS, ResultTable
from app.services.asymptotics_service import AsymptoticsService
from app.services.kernel_service import KernelService
from app.services.opuc_service import OpucService
from app.services.toeplitz_service import ToeplitzService
from app.services.weight_service import WeightService

# (n, index, exacto, predicho, error de referencia)
Record = Tuple[int, float, complex, complex, Optional[float]]


def _check_edge_indices(ks: Sequence[int], n: int) -> None:
    """Régimen de borde: 0 <= k <= ⌊√N⌋"""
    upper = isqrt(n) + 1
    for k in ks:
        if not 0 <= k < upper:
            raise IndexOutOfRangeException("k", k, upper)


def _comparison_table(name: str, records: List[Record]) -> ResultTable:
    by_index: Dict[float, List[Record]] = defaultdict(list)
    for record in records:
        by_index[record[1]].append(record)

    rows = []
    for index in sorted(by_index):
        group = sorted(by_index[index], key=lambda r: r[0])
        errors = [abs(r[2] - r[3]) for r in group]
        orders = AsymptoticsService.estimate_orders([r[0] for r in group], errors)
        for (n, _, exact, predicted, baseline), err, order in zip(group, errors, orders):
            rows.append([
                int(n), float(index),
                float(np.real(exact)), float(np.imag(exact)),
                float(np.real(predicted)), float(np.imag(predicted)),
                float(err), float(err / abs(exact)) if exact != 0 else float("inf"),
                float(order), float("nan") if baseline is None else float(baseline),
            ])
    return ResultTable(name=name, columns=THEOREM_COLUMNS, rows=rows)


class VerificationService:

    @staticmethod
    def columns_by_n(w: WeightSpec, n_values: Sequence[int]) -> Dict[int, PredictorColumn]:
        return {int(n): ToeplitzService.levinson_first_column(w, int(n)) for n in n_values}

    @staticmethod
    def outer_data(w: WeightSpec, ks: Sequence[int] = ()) -> OuterData:
        return WeightService.outer_factor(w, max(64, max(ks, default=0) + 1))

    @staticmethod
    def edge_table(
        d: OuterData, columns: Dict[int, PredictorColumn], ks: Sequence[int]
    ) -> ResultTable:
        """(T_N^{-1})_{k+1,1} frente a β_k^{(α)} - (α²/N)β_k^{(α+1)}; referencia: solo β_k^{(α)}"""
        records = []
        for n, p in columns.items():
            _check_edge_indices(ks, n)
            for k in ks:
                exact = complex(p.first_col[k])
                one_term = AsymptoticsService.edge_column_one_term(d, k, n).value
                records.append((
                    n, k, exact, AsymptoticsService.edge_column_asym(d, k, n).value, abs(exact - one_term)
                ))
        return _comparison_table("edge", records)

    @staticmethod
    def far_edge_table(
        d: OuterData, columns: Dict[int, PredictorColumn], ks: Sequence[int]
    ) -> ResultTable:
        """(T_N^{-1})_{N+1-k,1} frente a (c₁(1)/conj c₁(1)) β_k^{(α+1)} α/N"""
        for n in columns:
            _check_edge_indices(ks, n)
        records = [
            (n, k, complex(p.first_col[n - k]), AsymptoticsService.far_edge_column_asym(d, k, n).value, None)
            for n, p in columns.items() for k in ks
        ]
        return _comparison_table("far_edge", records)

    @staticmethod
    def bulk_table(
        d: OuterData, columns: Dict[int, PredictorColumn], xs: Sequence[float]
    ) -> ResultTable:
        """(T_N^{-1})_{[Nx]+1,1} frente a K_α(x) N^{α-1}/c₁(1)"""
        records = [
            (n, x, complex(p.first_col[int(np.floor(n * x))]),
             AsymptoticsService.bulk_column_asym(d, x, n).value, None)
            for n, p in columns.items() for x in xs
        ]
        return _comparison_table("bulk", records)

    @staticmethod
    def corollary_tables(
        d: OuterData, columns: Dict[int, PredictorColumn], ks: Sequence[int], xs: Sequence[float]
    ) -> List[ResultTable]:
        """Última columna cruda β̃_u: cola, cabeza y bulk"""
        tail, head, bulk = [], [], []
        for n, p in columns.items():
            last = ToeplitzService.last_column_via_symmetry(p)
            _check_edge_indices(ks, n)
            for k in ks:
                tail.append((n, k, complex(last[n - k]), AsymptoticsService.corollary_tail_asym(d, k, n).value, None))
                head.append((n, k, complex(last[k]), AsymptoticsService.corollary_head_asym(d, k, n).value, None))
            for x in xs:
                bulk.append((
                    n, x, complex(last[int(np.floor(n * x))]),
                    AsymptoticsService.corollary_bulk_asym(d, x, n).value, None,
                ))
        return [
            _comparison_table("corollary_tail", tail),
            _comparison_table("corollary_head", head),
            _comparison_table("corollary_bulk", bulk),
        ]

    @staticmethod
    def at_one_tables(
        w: WeightSpec, d: OuterData, columns: Dict[int, PredictorColumn], js: Sequence[int]
    ) -> List[ResultTable]:
        """(Φ_N*)^{(j)}(1) y Φ_N^{(j)}(1) mónicos frente a sus asintóticas"""
        star, plain = [], []
        for n, p in columns.items():
            pair = OpucService.build_pair(p, w, Normalization.MONIC, check_norm=False)
            for j in js:
                star.append((
                    n, j, complex(OpucService.eval_poly(pair, "phi_star", j, 1.0)),
                    AsymptoticsService.phi_star_at_one_asym(d, n, j).value, None,
                ))
                plain.append((
                    n, j, complex(OpucService.eval_poly(pair, "phi", j, 1.0)),
                    AsymptoticsService.phi_at_one_asym(d, n, j).value, None,
                ))
        return [_comparison_table("phi_star_at_one", star), _comparison_table("phi_at_one", plain)]

    @staticmethod
    def norm_relation_table(d: OuterData, columns: Dict[int, PredictorColumn]) -> ResultTable:
        rows = []
        for n, p in columns.items():
            predicted, exact, deviation = AsymptoticsService.norm_relation(d, n, p.norm11)
            rows.append([n, predicted, exact, deviation])
        return ResultTable(name="norm_relation", columns=["n", "predicted", "exact", "rel_dev"], rows=rows)

    @staticmethod
    def rescaled_exact_kernel(w: WeightSpec, n: int, u: float, v: float) -> complex:
        """K_N(e^{iu/N}, e^{iv/N}) / N"""
        exact = OpucService.exact_kernel(w, n)
        return complex(OpucService.cd_kernel_exact(exact, u / n, v / n)) / n

    @staticmethod
    def kernel_limit_table(
        w: WeightSpec, k: LimitKernel, n_values: Sequence[int], pairs: Sequence[Tuple[float, float]]
    ) -> ResultTable:
        """Núcleo exacto reescalado frente al núcleo límite; index numera los pares (u, v)"""
        records = []
        for n in n_values:
            exact_kernel = OpucService.exact_kernel(w, n)
            for i, (u, v) in enumerate(pairs):
                exact = complex(OpucService.cd_kernel_exact(exact_kernel, u / n, v / n)) / n
                records.append((n, i, exact, KernelService.kernel_eval(k, u, v), None))
        return _comparison_table("kernel_limit", records)

    @staticmethod
    def beta_identity_table(alphas: Sequence[float], js: Sequence[int]) -> ResultTable:
        rows = []
        for alpha in alphas:
            for j in js:
                integral, gamma_form = AsymptoticsService.phi_star_constant(alpha, j)
                rows.append([
                    float(alpha), int(j),
                    float("nan") if integral is None else integral, gamma_form,
                    AsymptoticsService.beta_identity_defect(alpha, j) if alpha != 0.0 else 0.0,
                ])
        return ResultTable(
            name="beta_identity", columns=["alpha", "j", "integral_form", "gamma_form", "defect"], rows=rows
        )

    @staticmethod
    def max_rel_err(table: ResultTable) -> float:
        values = [v for v in table.column("rel_err") if np.isfinite(v)]
        return float(max(values)) if values else float("nan")

    @staticmethod
    def summarize(tables: Sequence[ResultTable]) -> Dict[str, float]:
        summary = {}
        for table in tables:
            if table.columns == THEOREM_COLUMNS:
                summary[f"{table.name}.max_rel_err"] = VerificationService.max_rel_err(table)
                orders = [o for o in table.column("estimated_order") if np.isfinite(o)]
                if orders:
                    summary[f"{table.name}.median_order"] = float(np.median(orders))
        logger.info(f"Verification summary: {summary}")
        return summary
