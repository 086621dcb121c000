from datetime import datetime
from typing import Any, Dict, Optional
from fastapi import status


class OpucFHException(Exception):
    """
    Excepción base con información adicional para la CLI y la API
    """
    exit_code: int = 1

    def __init__(
        self,
        status_code: int,
        detail: str,
        error_code: str = None,
        extra_data: Optional[Dict[str, Any]] = None
    ):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail
        self.error_code = error_code or f"ERROR_{status_code}"
        self.timestamp = datetime.utcnow()
        self.extra_data = extra_data or {}


# Excepciones de validación
class ValidationException(OpucFHException):
    """Errores de validación de entrada"""
    exit_code = 2

    def __init__(
        self,
        detail: str = "Validation error",
        error_code: str = "VALIDATION_ERROR",
        extra_data: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=detail,
            error_code=error_code,
            extra_data=extra_data
        )


class InvalidWeightException(ValidationException):
    """Peso inválido (exponente fuera de rango o c no hermítico)"""
    def __init__(self, detail: str):
        super().__init__(detail=detail, error_code="INVALID_WEIGHT")


class WeightNotPositiveException(ValidationException):
    """El factor suave c no es estrictamente positivo"""
    def __init__(self, min_value: float, theta: float):
        super().__init__(
            detail=f"Smooth factor c is not strictly positive (min {min_value:.3e} at theta={theta:.6f})",
            error_code="WEIGHT_NOT_POSITIVE",
            extra_data={"min_value": min_value, "theta": theta}
        )


class IndexOutOfRangeException(ValidationException):
    """Índice fuera del rango disponible"""
    def __init__(self, name: str, value: int, upper: int):
        super().__init__(
            detail=f"{name}={value} out of range [0, {upper})",
            error_code="INDEX_OUT_OF_RANGE",
            extra_data={"name": name, "value": value, "upper": upper}
        )


class KernelDomainException(ValidationException):
    """Argumentos fuera del dominio del núcleo límite"""
    def __init__(self, detail: str):
        super().__init__(detail=detail, error_code="KERNEL_DOMAIN")


class InvalidIntervalException(ValidationException):
    """Intervalo inválido"""
    def __init__(self, detail: str):
        super().__init__(detail=detail, error_code="INVALID_INTERVAL")


class OracleSizeException(ValidationException):
    """Tamaño por encima del límite de memoria del oráculo denso"""
    def __init__(self, n: int, max_n: int):
        super().__init__(
            detail=f"Dense oracle refuses n={n} (limit {max_n})",
            error_code="ORACLE_SIZE",
            extra_data={"n": n, "max_n": max_n}
        )


# Excepciones de diagnóstico numérico
class NumericalDiagnosticException(OpucFHException):
    """Fallo de un diagnóstico numérico"""
    exit_code = 3

    def __init__(
        self,
        detail: str = "Numerical diagnostic failed",
        error_code: str = "NUMERICAL_DIAGNOSTIC",
        extra_data: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=detail,
            error_code=error_code,
            extra_data=extra_data
        )


class FactorizationNotConvergedException(NumericalDiagnosticException):
    """La factorización espectral no convergió"""
    def __init__(self, iterations: int, residual: float):
        super().__init__(
            detail=f"Spectral factorization did not converge after {iterations} iterations (residual {residual:.3e})",
            error_code="FACTORIZATION_NOT_CONVERGED",
            extra_data={"iterations": iterations, "residual": residual}
        )


class LevinsonBreakdownException(NumericalDiagnosticException):
    """Coeficiente de Verblunsky con módulo >= 1"""
    def __init__(self, step: int, modulus: float):
        super().__init__(
            detail=f"Levinson breakdown at step {step}: |gamma|={modulus:.17g}",
            error_code="LEVINSON_BREAKDOWN",
            extra_data={"step": step, "modulus": modulus}
        )


class NormInconsistencyException(NumericalDiagnosticException):
    """Las dos evaluaciones de h_m no coinciden"""
    def __init__(self, m: int, from_column: float, from_quadrature: float):
        super().__init__(
            detail=f"h_{m} inconsistent: column gives {from_column:.17g}, quadrature gives {from_quadrature:.17g}",
            error_code="NORM_INCONSISTENCY",
            extra_data={"m": m, "from_column": from_column, "from_quadrature": from_quadrature}
        )


class OracleResidualException(NumericalDiagnosticException):
    """Residuo del oráculo denso demasiado grande"""
    def __init__(self, n: int, residual: float):
        super().__init__(
            detail=f"Dense oracle residual {residual:.3e} too large at n={n}",
            error_code="ORACLE_RESIDUAL",
            extra_data={"n": n, "residual": residual}
        )


class AsymptoticFormMismatchException(NumericalDiagnosticException):
    """Forma integral y forma Gamma no coinciden"""
    def __init__(self, integral_form: complex, gamma_form: complex):
        super().__init__(
            detail=f"Integral form {integral_form} and Gamma form {gamma_form} disagree",
            error_code="ASYMPTOTIC_FORM_MISMATCH",
            extra_data={"integral_form": str(integral_form), "gamma_form": str(gamma_form)}
        )


class GridTooCoarseException(NumericalDiagnosticException):
    """Malla del DPP insuficiente para el rango del núcleo"""
    def __init__(self, grid_size: int, n: int, deviation: float, measure: str = "gram_deviation"):
        super().__init__(
            detail=f"Grid of {grid_size} cells too coarse for rank {n} ({measure} {deviation:.3e}); increase grid_size",
            error_code="GRID_TOO_COARSE",
            extra_data={"grid_size": grid_size, "n": n, "measure": measure, "deviation": deviation}
        )


class DecayNotMonotoneException(NumericalDiagnosticException):
    """Las probabilidades reescaladas no decrecen"""
    def __init__(self, n_values: list, probabilities: list):
        super().__init__(
            detail="Rescaled counting probabilities are not monotonically decreasing",
            error_code="DECAY_NOT_MONOTONE",
            extra_data={"n_values": n_values, "probabilities": probabilities}
        )


# Excepciones de salida
class OutputWriteException(OpucFHException):
    """Error de escritura de artefactos"""
    exit_code = 1

    def __init__(self, path: str, reason: str):
        super().__init__(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Cannot write {path}: {reason}",
            error_code="OUTPUT_WRITE",
            extra_data={"path": path}
        )
