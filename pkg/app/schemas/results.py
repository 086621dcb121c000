from typing import Any, Dict, List

from pydantic import BaseModel, Field, model_validator

from app.schemas.run_config import Command

# Esquema uniforme de las tablas de verificación
THEOREM_COLUMNS = [
    "n", "index", "exact_re", "exact_im", "predicted_re", "predicted_im",
    "abs_err", "rel_err", "estimated_order", "baseline_abs_err",
]


class ResultTable(BaseModel):
    name: str = Field(..., description="Nombre de la tabla (sufijo del fichero CSV)")
    columns: List[str] = Field(..., min_length=1)
    rows: List[List[Any]] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_rows(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} of table {self.name} has {len(row)} values, expected {width}")
        return self

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


class ResultSet(BaseModel):
    command: Command
    metadata: Dict[str, Any] = Field(default_factory=dict)
    tables: List[ResultTable] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

    def table(self, name: str) -> ResultTable:
        for table in self.tables:
            if table.name == name:
                return table
        raise KeyError(name)
