"""Self-stresses of d-frameworks: equilibrium, monodromy, surgery, 1-forms and lifts."""
from .affine import DEFAULT_TOL, AffineSubspace, Tolerances, join, meet, span_of_points
from .criteria import check_all
from .errors import StressKitError
from .framework import DFramework, Stress, framework_from_cells, stress_space, validate
from .paths import FacePath, induced_face_path, monodromy
from .rframework import CWComplex, RFramework, induced_d_framework, lift_space

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL", "AffineSubspace", "Tolerances", "join", "meet", "span_of_points",
    "check_all", "StressKitError", "DFramework", "Stress", "framework_from_cells",
    "stress_space", "validate", "FacePath", "induced_face_path", "monodromy",
    "CWComplex", "RFramework", "induced_d_framework", "lift_space",
]
