from enum import Enum
from math import isqrt
from typing import Annotated, Any, Dict, List, Optional, Tuple, Type

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.models.ensemble import SamplerMethod
from app.models.kernel import Gauge
from app.models.opuc import Normalization
from app.schemas.weight import WeightPayload

# d del apéndice; α = -d
APPENDIX_D_VALUES = [-0.275, -0.150, -0.025, 0.100, 0.225]


class Command(str, Enum):
    COLUMNS = "columns"
    PHI = "phi"
    VERIFY_THEOREMS = "verify-theorems"
    KERNEL = "kernel"
    GAP = "gap"
    SAMPLE = "sample"
    APPENDIX = "appendix"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class OutputTarget(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = Field(None, description="Fichero de salida; None escribe en stdout")
    format: OutputFormat = OutputFormat.CSV


class CommandParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_interval(v: Tuple[float, float]) -> Tuple[float, float]:
    if v[0] > v[1]:
        raise ValueError("interval must satisfy u <= v")
    return v


Interval = Annotated[Tuple[float, float], AfterValidator(_check_interval)]


def _check_edge_regime(ks: List[int], n: int) -> None:
    """Asintóticas de borde: k <= ⌊√N⌋"""
    if ks and max(ks) > isqrt(n):
        raise ValueError(f"k={max(ks)} outside the edge regime k <= isqrt(N) = {isqrt(n)}")


class ColumnsParams(CommandParams):
    n: int = Field(1024, ge=1, le=16384, description="Orden N de T_N(f)")
    ks: List[int] = Field(default_factory=lambda: [0, 1, 2, 4], description="Índices k de los bordes")
    xs: List[float] = Field(default_factory=lambda: [0.35, 0.5, 0.65], description="Posiciones x del bulk")

    @field_validator("ks")
    @classmethod
    def validate_ks(cls, v):
        if any(k < 0 for k in v):
            raise ValueError("k must be >= 0")
        return v

    @field_validator("xs")
    @classmethod
    def validate_xs(cls, v):
        if any(not 0.0 < x < 1.0 for x in v):
            raise ValueError("x must lie in (0, 1)")
        return v

    @model_validator(mode="after")
    def validate_edge_regime(self):
        _check_edge_regime(self.ks, self.n)
        return self


class PhiParams(CommandParams):
    n: int = Field(1024, ge=0, le=16384)
    j_max: int = Field(2, ge=0, le=6, description="Derivadas j = 0..j_max en z = 1")
    normalization: Normalization = Normalization.MONIC


class VerifyParams(CommandParams):
    n_values: List[int] = Field(default_factory=lambda: [256, 512, 1024, 2048], min_length=2)
    ks: List[int] = Field(default_factory=lambda: [0, 1, 2, 4])
    xs: List[float] = Field(default_factory=lambda: [0.35, 0.5, 0.65])
    js: List[int] = Field(default_factory=lambda: [0, 1, 2])
    kernel_pairs: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 2.0), (0.5, 3.0)])
    shrinking_n_values: List[int] = Field(default_factory=lambda: [2 ** e for e in range(6, 13)])

    @field_validator("n_values", "shrinking_n_values")
    @classmethod
    def validate_sizes(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("sizes must be >= 1")
        return sorted(v)

    @model_validator(mode="after")
    def validate_edge_regime(self):
        _check_edge_regime(self.ks, self.n_values[0])
        return self


class KernelParams(CommandParams):
    u_min: float = 0.25
    u_max: float = 4.0
    points: int = Field(16, ge=1, le=256)
    gauge: Gauge = Gauge.PROOF
    apply_c_factor: bool = False

    @model_validator(mode="after")
    def validate_range(self):
        if self.u_min > self.u_max:
            raise ValueError("u_min must be <= u_max")
        return self


class GapParams(CommandParams):
    interval: Interval = (0.5, 3.0)
    m_max: int = Field(6, ge=0, le=12)
    nodes: int = Field(
        default_factory=lambda: settings.nystrom_default_nodes,
        ge=settings.nystrom_min_nodes, le=settings.nystrom_max_nodes,
    )
    gauge: Gauge = Gauge.PROOF


class SampleParams(CommandParams):
    n: int = Field(32, ge=1, le=settings.dpp_max_n)
    samples: int = Field(2000, ge=1)
    method: SamplerMethod = SamplerMethod.DPP
    interval: Interval = (0.5, 3.0)
    scale: float = Field(1.0, ge=0, description="Exponente q del reescalado [u/N^q, v/N^q]")
    grid_size: Optional[int] = Field(None, ge=512)
    m_max: int = Field(6, ge=0, le=12)


class AppendixParams(CommandParams):
    alphas: Optional[List[float]] = Field(None, description="Por defecto α = -d para los d del apéndice")
    n_min: int = Field(400, ge=1)
    n_max: int = Field(640, ge=1)
    step: int = Field(6, ge=1)

    @model_validator(mode="after")
    def validate_range(self):
        if self.n_min > self.n_max:
            raise ValueError("n_min must be <= n_max")
        return self

    @property
    def alpha_values(self) -> List[float]:
        return self.alphas if self.alphas else [-d for d in APPENDIX_D_VALUES]


PARAMS_BY_COMMAND: Dict[Command, Type[CommandParams]] = {
    Command.COLUMNS: ColumnsParams,
    Command.PHI: PhiParams,
    Command.VERIFY_THEOREMS: VerifyParams,
    Command.KERNEL: KernelParams,
    Command.GAP: GapParams,
    Command.SAMPLE: SampleParams,
    Command.APPENDIX: AppendixParams,
}


class RunConfig(BaseModel):
    """Configuración validada de una ejecución (CLI o API)"""
    model_config = ConfigDict(extra="forbid")

    command: Command
    weight: WeightPayload
    output: OutputTarget = Field(default_factory=OutputTarget)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0, lt=2 ** 64)
    params: Any = None

    @model_validator(mode="before")
    @classmethod
    def coerce_params(cls, data):
        """params se valida con el modelo propio del comando"""
        if isinstance(data, dict) and "command" in data:
            command = Command(data["command"])
            params = data.get("params")
            if isinstance(params, BaseModel):
                params = params.model_dump()
            data = {**data, "params": PARAMS_BY_COMMAND[command].model_validate(params or {})}
        return data
