"""Hot kernels, dispatched to numba or numpy according to ``skewfv._backend``."""
from .._backend import BACKEND, USE_NUMBA
from . import _numpy as numpy_impl
from ._numpy import (CORR_EC, CORR_SISC, CORR_UC, SCHEME_CDS, SCHEME_CICSAM,
                     SCHEME_LB, SCHEME_UDS)

if USE_NUMBA:
    from . import _numba as numba_impl
    _impl = numba_impl
else:
    numba_impl = None
    _impl = numpy_impl

gauss_gradient = _impl.gauss_gradient
lsq_gradient = _impl.lsq_gradient
neighbour_extrema = _impl.neighbour_extrema
advection_weights = _impl.advection_weights
walk_locate = _impl.walk_locate
gauss_seidel = _impl.gauss_seidel

__all__ = [
    "BACKEND", "numpy_impl", "numba_impl",
    "gauss_gradient", "lsq_gradient", "neighbour_extrema", "advection_weights",
    "walk_locate", "gauss_seidel",
    "SCHEME_UDS", "SCHEME_CDS", "SCHEME_CICSAM", "SCHEME_LB",
    "CORR_UC", "CORR_EC", "CORR_SISC",
]
