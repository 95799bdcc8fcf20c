"""Ahlfors map of bounded multiply connected regions via a boundary integral
equation with the generalized Neumann kernel."""

__version__ = "0.1.0"

from .geometry import CurveSpec, ParametrizedBoundary, discretize, point_in_region  # noqa: E402
from .ahlfors import AhlforsSolution, eval_omega, solve_ahlfors, zero_count  # noqa: E402
from .zeros import ZeroProblem, ZeroSearchConfig, find_zeros  # noqa: E402

__all__ = [
    "CurveSpec",
    "ParametrizedBoundary",
    "discretize",
    "point_in_region",
    "AhlforsSolution",
    "solve_ahlfors",
    "eval_omega",
    "zero_count",
    "ZeroProblem",
    "ZeroSearchConfig",
    "find_zeros",
]
