"""
opuc-fh: línea de comandos

    opuc-fh <command> --alpha F [--c-file PATH] --out PATH --format {csv,json} [--seed U64]

Códigos de salida: 0 éxito, 2 validación, 3 diagnóstico numérico, 1 E/S.
"""
import functools
import sys
from typing import Any, Dict, Optional

import click
from loguru import logger
from pydantic import ValidationError

from app import __version__
from app.config import settings
from app.core.exceptions import OpucFHException
from app.core.logging import setup_logging
from app.schemas.run_config import Command, RunConfig
from app.schemas.weight import WeightPayload
from app.services.command_service import CommandService
from app.utils.emit import emit


def common_options(func):
    """Opciones compartidas por todos los subcomandos"""
    @click.option("--alpha", type=float, default=None, help="Exponente Fisher–Hartwig α, |α| < 1/2")
    @click.option("--c-file", type=click.Path(exists=True, dir_okay=False), default=None,
                  help="JSON con los coeficientes ĉ(k), k = 0..M, como pares [re, im]")
    @click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                  help="Fichero de salida (stdout si se omite)")
    @click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
    @click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
                  help="Semilla del generador Philox")
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)
    return wrapper


def _weight(alpha: Optional[float], c_file: Optional[str], alpha_required: bool = True) -> Dict[str, Any]:
    if c_file is not None:
        return WeightPayload.from_file(c_file, alpha).model_dump()
    if alpha is None:
        if alpha_required:
            raise click.UsageError("--alpha is required")
        alpha = 0.0
    return {"alpha": alpha}


def run_command(
    command: Command,
    params: Dict[str, Any],
    alpha: Optional[float],
    c_file: Optional[str],
    out: Optional[str],
    fmt: str,
    seed: Optional[int],
    alpha_required: bool = True,
) -> None:
    """Validar, ejecutar y emitir; traduce errores a códigos de salida"""
    try:
        config = RunConfig.model_validate({
            "command": command,
            "weight": _weight(alpha, c_file, alpha_required),
            "output": {"path": out, "format": fmt},
            "seed": settings.default_seed if seed is None else seed,
            "params": {k: v for k, v in params.items() if v is not None},
        })
        result = CommandService.run(config)
        written = emit(result, config.output)
        for path in written:
            logger.info(f"Wrote {path}")
    except ValidationError as e:
        click.echo(f"Error [VALIDATION_ERROR]: {e}", err=True)
        sys.exit(2)
    except OpucFHException as e:
        click.echo(f"Error [{e.error_code}]: {e.detail}", err=True)
        sys.exit(e.exit_code)


@click.group()
@click.version_option(__version__, prog_name="opuc-fh")
@click.option("--log-level", default=None, help="Nivel de log (por defecto el de la configuración)")
def cli(log_level: Optional[str]):
    """Polinomios ortogonales en el círculo para pesos Fisher–Hartwig"""
    setup_logging(log_level)


@cli.command()
@common_options
@click.option("--n", type=int, default=None, help="Orden N")
@click.option("--k", "ks", type=int, multiple=True, help="Índices k de los bordes")
@click.option("--x", "xs", type=float, multiple=True, help="Posiciones x del bulk")
def columns(alpha, c_file, out, fmt, seed, n, ks, xs):
    """Primera y última columna de T_N(f)^{-1} con sus predicciones"""
    run_command(Command.COLUMNS, {"n": n, "ks": list(ks) or None, "xs": list(xs) or None},
                alpha, c_file, out, fmt, seed)


@cli.command()
@common_options
@click.option("--n", type=int, default=None, help="Grado N")
@click.option("--j-max", type=int, default=None, help="Derivadas j = 0..j_max en z = 1")
@click.option("--normalization", type=click.Choice(["monic", "predictor", "raw"]), default=None)
def phi(alpha, c_file, out, fmt, seed, n, j_max, normalization):
    """Coeficientes de Φ_N, Φ_N* y sus valores en z = 1"""
    run_command(Command.PHI, {"n": n, "j_max": j_max, "normalization": normalization},
                alpha, c_file, out, fmt, seed)


@cli.command("verify-theorems")
@common_options
@click.option("--n-values", type=int, multiple=True, help="Tamaños N del barrido")
def verify_theorems(alpha, c_file, out, fmt, seed, n_values):
    """Tablas exacto frente a asintótico con órdenes estimados"""
    run_command(Command.VERIFY_THEOREMS, {"n_values": list(n_values) or None},
                alpha, c_file, out, fmt, seed)


@cli.command()
@common_options
@click.option("--u-min", type=float, default=None)
@click.option("--u-max", type=float, default=None)
@click.option("--points", type=int, default=None)
@click.option("--gauge", type=click.Choice(["proof", "theorem"]), default=None)
@click.option("--apply-c-factor", is_flag=True, default=False, help="Dividir por c(1) = |c₁(1)|²")
def kernel(alpha, c_file, out, fmt, seed, u_min, u_max, points, gauge, apply_c_factor):
    """Núcleo límite K(u, v) sobre una malla"""
    run_command(Command.KERNEL, {
        "u_min": u_min, "u_max": u_max, "points": points, "gauge": gauge, "apply_c_factor": apply_c_factor,
    }, alpha, c_file, out, fmt, seed)


@cli.command()
@common_options
@click.option("--interval", type=(float, float), default=None, help="Intervalo u v")
@click.option("--m-max", type=int, default=None)
@click.option("--nodes", type=int, default=None, help="Nodos de Gauss–Legendre")
@click.option("--gauge", type=click.Choice(["proof", "theorem"]), default=None)
def gap(alpha, c_file, out, fmt, seed, interval, m_max, nodes, gauge):
    """Probabilidades de conteo por determinantes de Fredholm"""
    run_command(Command.GAP, {"interval": interval, "m_max": m_max, "nodes": nodes, "gauge": gauge},
                alpha, c_file, out, fmt, seed)


@cli.command()
@common_options
@click.option("--n", type=int, default=None, help="Tamaño N del ensemble")
@click.option("--samples", type=int, default=None)
@click.option("--method", type=click.Choice(["mcmc", "dpp"]), default=None)
@click.option("--interval", type=(float, float), default=None, help="Intervalo u v")
@click.option("--scale", type=float, default=None, help="Exponente q de [u/N^q, v/N^q]")
@click.option("--grid-size", type=int, default=None)
def sample(alpha, c_file, out, fmt, seed, n, samples, method, interval, scale, grid_size):
    """Histograma de conteos por Monte Carlo"""
    run_command(Command.SAMPLE, {
        "n": n, "samples": samples, "method": method, "interval": interval,
        "scale": scale, "grid_size": grid_size,
    }, alpha, c_file, out, fmt, seed)


@cli.command()
@common_options
@click.option("--d", "ds", type=float, multiple=True, help="Valores d del apéndice (α = -d)")
@click.option("--n-min", type=int, default=None)
@click.option("--n-max", type=int, default=None)
@click.option("--step", type=int, default=None)
def appendix(alpha, c_file, out, fmt, seed, ds, n_min, n_max, step):
    """Tablas Φ_N(1) frente a A N^α, N entre 400 y 640"""
    alphas = [-d for d in ds] or ([alpha] if alpha is not None else None)
    run_command(Command.APPENDIX, {"alphas": alphas, "n_min": n_min, "n_max": n_max, "step": step},
                None if ds else alpha, c_file, out, fmt, seed, alpha_required=False)


def main():
    cli()


if __name__ == "__main__":
    main()
