"""Mechanism integrated information for classical causal networks and qubit systems."""

from . import classical, partitions, quantum, tensor
from .errors import NumericError, ValidationError
from .tensor import DEFAULT_TOL, DensityMatrix, UnitaryOperator

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DensityMatrix",
    "NumericError",
    "UnitaryOperator",
    "ValidationError",
    "__version__",
    "classical",
    "partitions",
    "quantum",
    "tensor",
]
