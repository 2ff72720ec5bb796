"""Exact linear and lattice data of calibrated quantum fans."""

from .calibration import CalibrationRec, XiLattice
from .chart import ChartPresentation, build_chart, gluing, verify_choice_independence
from .cone import Cone, dual_cone, intersect, is_face_of
from .errors import QToricError
from .fan import QuantumFan, close_fan
from .linalg import Matrix
from .morphism import FanMorphismRec, induced_chart_morphism, validate_morphism
from .scalar import IrrationalBasis, Scalar, Symbol, sign

__version__ = "0.1.0"

__all__ = [
    "CalibrationRec", "ChartPresentation", "Cone", "FanMorphismRec", "IrrationalBasis", "Matrix",
    "QToricError", "QuantumFan", "Scalar", "Symbol", "XiLattice", "build_chart", "close_fan",
    "dual_cone", "gluing", "induced_chart_morphism", "intersect", "is_face_of", "sign",
    "validate_morphism", "verify_choice_independence",
]
