"""
BMW workbench

Exact computations with the Brauer algebra B_r(3), the BMW algebra BMW_r(q) and
their tensor-space representations on the three-dimensional module.
"""

__version__ = "1.0.0"

from .brauer import BrauerAlgebra, BrauerDiagram
from .bmwq import BMWAlgebra
from .cellular import cell_module, composition_factors, gram_radical
from .exceptions import WorkbenchError
from .partitions import Partition, lambda0, lambda_r
from .scalars import LaurentPoly, ScalarQ
from .tensorrep import TensorRepresentation, verify_main_theorem

__all__ = [
    "__version__",
    "BMWAlgebra",
    "BrauerAlgebra",
    "BrauerDiagram",
    "LaurentPoly",
    "Partition",
    "ScalarQ",
    "TensorRepresentation",
    "WorkbenchError",
    "cell_module",
    "composition_factors",
    "gram_radical",
    "lambda0",
    "lambda_r",
    "verify_main_theorem",
]
