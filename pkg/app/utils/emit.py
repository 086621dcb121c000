"""
Escritura de artefactos: CSV con cabecera de comentarios (# clave: valor)
o JSON vía orjson. Los flotantes se escriben con 17 cifras significativas.
"""
import csv
import io
import sys
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
import orjson

from app.config import settings
from app.core.exceptions import OutputWriteException
from app.schemas.results import ResultSet, ResultTable
from app.schemas.run_config import OutputFormat, OutputTarget

JSON_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2 | orjson.OPT_NON_STR_KEYS


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{settings.output_precision}g}"
    return str(value)


def _header_value(value: Any) -> str:
    if isinstance(value, (dict, list, tuple)):
        return orjson.dumps(value, option=orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS).decode()
    return format_value(value)


def render_csv(result: ResultSet, table: Optional[ResultTable]) -> str:
    """Una tabla como CSV; sin tabla solo se escribe la cabecera"""
    buffer = io.StringIO()
    for key, value in result.metadata.items():
        buffer.write(f"# {key}: {_header_value(value)}\n")
    for key, value in result.summary.items():
        buffer.write(f"# summary.{key}: {_header_value(value)}\n")
    if table is not None:
        buffer.write(f"# table: {table.name}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def json_ready(value: Any) -> Any:
    """NaN e infinitos se escriben como las cadenas "nan", "inf" y "-inf", igual que en el CSV"""
    if isinstance(value, float):
        return value if np.isfinite(value) else str(value)
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, dict):
        return {k: json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    return value


def render_json(result: ResultSet) -> bytes:
    return orjson.dumps(json_ready(result.model_dump(mode="python")), option=JSON_OPTIONS)


def _write(path: Path, payload: bytes) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise OutputWriteException(str(path), str(e))
    return path


def emit(result: ResultSet, target: OutputTarget) -> List[Path]:
    """
    Escribir el resultado; devuelve los ficheros creados.

    Con varias tablas en CSV cada una va a <stem>_<tabla><sufijo>. Sin path
    se escribe en stdout.
    """
    if target.format == OutputFormat.JSON:
        payload = render_json(result)
        if target.path is None:
            sys.stdout.write(payload.decode() + "\n")
            return []
        return [_write(Path(target.path), payload)]

    tables = result.tables or [None]
    if target.path is None:
        sys.stdout.write("".join(render_csv(result, table) for table in tables))
        return []

    base = Path(target.path)
    if len(tables) == 1:
        return [_write(base, render_csv(result, tables[0]).encode())]
    suffix = base.suffix or ".csv"
    return [
        _write(base.with_name(f"{base.stem}_{table.name}{suffix}"), render_csv(result, table).encode())
        for table in tables
    ]
