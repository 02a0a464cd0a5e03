"""Series over the positive part of SL(2, Z) for convex curves."""

from .errors import (ArithmeticOverflowError, DegenerateGeometryError, DomainError,
                     InvalidInputError, Sl2SumError, ToleranceNotMetError,
                     UnsupportedOperationError)
from .lattice import PrimitiveVector, UnimodularPair, children, locate, mediant, root
from .series import SeriesResult, SumControls, TailKind, mixed_sum, sum_cycloid_arctan, sum_power
from .support import CURVES, Curve, SampledCurve, get_curve

__version__ = "0.1.0"

__all__ = [
    "ArithmeticOverflowError", "CURVES", "Curve", "DegenerateGeometryError", "DomainError",
    "InvalidInputError", "PrimitiveVector", "SampledCurve", "SeriesResult", "Sl2SumError",
    "SumControls", "TailKind", "ToleranceNotMetError", "UnimodularPair",
    "UnsupportedOperationError", "children", "get_curve", "locate", "mediant", "mixed_sum",
    "root", "sum_cycloid_arctan", "sum_power",
]
