from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from app.models.weight import WeightSpec
from app.schemas.results import ResultTable
from app.services.asymptotics_service import AsymptoticsService
from app.services.opuc_service import OpucService
from app.services.toeplitz_service import ToeplitzService
from app.services.weight_service import WeightService

APPENDIX_COLUMNS = ["n", "exact", "fitted", "rel_dev", "theory", "theory_rel_dev"]


class AppendixService:

    @staticmethod
    def phi_at_one_sweep(w: WeightSpec, n_values: np.ndarray) -> np.ndarray:
        """Φ_N(1) mónico para todos los N pedidos con un único Levinson en N máximo"""
        n_max = int(np.max(n_values))
        column = ToeplitzService.levinson_first_column(w, n_max)
        phi, _ = OpucService.family_values(column.verblunsky, np.array([1.0]), n_max + 1)
        return phi[np.asarray(n_values, dtype=int), 0]

    @staticmethod
    def run_appendix_table(
        alpha: float,
        n_min: int = 400,
        n_max: int = 640,
        step: int = 6,
        c_fourier: Optional[np.ndarray] = None,
    ) -> Tuple[ResultTable, Dict[str, float]]:
        """
        Φ_N(1) exacto frente a A N^α (A ajustado en la primera fila) y frente
        a la constante c₁(0)Γ(α+1)/(Γ(2α+1) conj c₁(1)).
        """
        w = WeightSpec(alpha=alpha, c_fourier=[1.0] if c_fourier is None else c_fourier)
        n_values = np.arange(n_min, n_max + 1, step)
        logger.info(f"Appendix sweep: alpha={alpha}, N={n_min}..{n_max} step {step}")
        exact = np.real(AppendixService.phi_at_one_sweep(w, n_values))

        d = WeightService.outer_factor(w, 8)
        theory_constant = float(np.real(AsymptoticsService.phi_at_one_asym(d, 1, 0).value))
        anchor = exact[0] * n_values[0] ** (-alpha)
        fitted = anchor * n_values.astype(float) ** alpha
        theory = theory_constant * n_values.astype(float) ** alpha
        rows = [
            [int(n), float(e), float(f), float(abs(e / f - 1.0)), float(t), float(abs(e / t - 1.0))]
            for n, e, f, t in zip(n_values, exact, fitted, theory)
        ]
        normalized = exact * n_values.astype(float) ** (-alpha)
        summary = {
            "alpha": alpha,
            "d": -alpha,
            "anchor_constant": float(anchor),
            "theory_constant": theory_constant,
            "relative_spread": float((normalized.max() - normalized.min()) / np.mean(normalized)),
            "theory_rel_dev": float(abs(np.mean(normalized) / theory_constant - 1.0)),
        }
        return ResultTable(name=f"appendix_d{0.0 - alpha:.3f}", columns=APPENDIX_COLUMNS, rows=rows), summary
