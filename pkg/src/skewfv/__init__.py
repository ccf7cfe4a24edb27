"""Finite-volume toolkit for bounded skewness corrections in VoF advection and
CST species diffusion on 2D unstructured meshes."""
from ._backend import BACKEND, USE_NUMBA
from .advection import AdvectionSchemeConfig
from .diffusion import SnGradConfig
from .fields import FixedValue, ScalarField, ZeroGradient
from .mesh import Mesh, build_cartesian, build_triangular, distort_random, distort_systematic
from .transport import CstPhysics, SpeciesStepper, step_alpha

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "USE_NUMBA", "AdvectionSchemeConfig", "SnGradConfig", "FixedValue",
    "ScalarField", "ZeroGradient", "Mesh", "build_cartesian", "build_triangular",
    "distort_random", "distort_systematic", "CstPhysics", "SpeciesStepper", "step_alpha",
]
