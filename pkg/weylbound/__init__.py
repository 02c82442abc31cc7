from .errors import (
    WeylBoundError, ValidationError, DomainError, UnsupportedError, WindowError,
    RootBracketError, ConvergenceError, RootScanError, SpectrumFileError,
)
from .geometry import (
    BoundPair, Dimension, EigenfunctionQuery, HeatQuery, HyperbolicSurface, LocalGeometry,
)
from .specfun import QuadratureSpec
from .nu_constants import nu, nu_cached, nu_table
from .weyl_counting import (
    f_prime, g_function, g_norm, global_counting_bounds, local_counting_bounds,
    local_counting_bounds_lowdim,
)
from .eigenfunction_bounds import eigenfunction_bound, grad_bound, sup_bound
from .heat_bounds import heat_trace_upper, local_heat_trace_upper, remainder_upper_surface
from .spectrum import EigenvalueFile, Spectrum, parse_eigenvalue_file
from .zeta_determinant import DetQuery, DetResult, det_bounds
from .wave_kernel import PointPairInvariant, TestFunction, bump, diagonal_value

__all__ = [
    "WeylBoundError", "ValidationError", "DomainError", "UnsupportedError", "WindowError",
    "RootBracketError", "ConvergenceError", "RootScanError", "SpectrumFileError",
    "BoundPair", "Dimension", "EigenfunctionQuery", "HeatQuery", "HyperbolicSurface",
    "LocalGeometry", "QuadratureSpec",
    "nu", "nu_cached", "nu_table",
    "f_prime", "g_function", "g_norm", "global_counting_bounds", "local_counting_bounds",
    "local_counting_bounds_lowdim",
    "eigenfunction_bound", "grad_bound", "sup_bound",
    "heat_trace_upper", "local_heat_trace_upper", "remainder_upper_surface",
    "EigenvalueFile", "Spectrum", "parse_eigenvalue_file",
    "DetQuery", "DetResult", "det_bounds",
    "PointPairInvariant", "TestFunction", "bump", "diagonal_value",
]

__version__ = "0.1.0"
