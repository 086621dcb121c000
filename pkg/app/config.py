from pydantic_settings import BaseSettings
from typing import List


class Settings(BaseSettings):
    # App settings
    app_name: str = "OPUC Fisher-Hartwig"
    app_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "INFO"

    # Pesos y factorización espectral
    positivity_grid: int = 4096
    factorization_grid_log2: int = 13
    factorization_tol: float = 1e-12
    factorization_max_iter: int = 200

    # Toeplitz / oráculo denso
    dense_oracle_max_n: int = 2048
    dense_residual_tol: float = 1e-6
    norm_consistency_tol: float = 1e-8
    norm_quadrature_max_degree: int = 64

    # Cuadraturas
    jacobi_nodes: int = 64
    nystrom_default_nodes: int = 64
    nystrom_min_nodes: int = 8
    nystrom_max_nodes: int = 512
    interval_clip: float = 1e-6  # distancia mínima a u = 0
    eigenvalue_one_tol: float = 1e-12
    coincident_tol: float = 1e-8

    # MCMC
    mcmc_burn_in: int = 400
    mcmc_chains: int = 16
    mcmc_workers: int = 4
    mcmc_target_acceptance: float = 0.4
    mcmc_max_thinning: int = 50

    # DPP sobre malla
    dpp_grid_size: int = 4096
    dpp_grid_power: float = 2.0
    dpp_rank_tol: float = 1e-8
    dpp_gram_tol: float = 5e-2
    dpp_max_cell_phase: float = 1.0  # (n-1)·Δθ máximo en la celda más ancha
    dpp_max_n: int = 128

    # Reproducibilidad y salida
    default_seed: int = 20240601
    output_precision: int = 17

    # CORS settings
    allowed_origins: str = "*"

    class Config:
        env_file = ".env"
        env_prefix = "OPUC_"
        case_sensitive = False
        extra = "ignore"

    @property
    def factorization_grid(self) -> int:
        """Tamaño mínimo de la malla FFT de la factorización espectral"""
        return 2 ** self.factorization_grid_log2

    @property
    def origins(self) -> List[str]:
        """Lista de orígenes CORS permitidos"""
        return [origin.strip() for origin in self.allowed_origins.split(",") if origin.strip()]


# Create settings instance
settings = Settings()
