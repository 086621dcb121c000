from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict


def readonly(value: Any, dtype=complex) -> np.ndarray:
    """Copia inmutable de un array (1-D o superior)"""
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array


class ArrayModel(BaseModel):
    """Modelo inmutable que admite campos numpy"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
