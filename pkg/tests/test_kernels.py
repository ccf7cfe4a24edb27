"""The numba and numpy kernel paths agree."""
import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from skewfv import kernels
from skewfv.fields import ScalarField, _lsq_vectors
from skewfv.mesh import build_cartesian, distort_random

numba_impl = pytest.importorskip("skewfv.kernels._numba")
numpy_impl = kernels.numpy_impl

MESH = distort_random(build_cartesian(9, 7, 1.0, 1.0), 0.2, seed=11)
seeds = st.integers(0, 2**31 - 1)


def _phi(seed):
    return np.random.default_rng(seed).normal(size=MESH.n_cells)


@given(seeds)
def test_gauss_gradient(seed):
    g = MESH.geometry
    fv = ScalarField(MESH, _phi(seed)).face_values()
    args = (MESH.owner, MESH.neighbour, MESH.n_internal, g.Sf, fv, g.cell_volumes)
    assert np.allclose(numba_impl.gauss_gradient(*args), numpy_impl.gauss_gradient(*args),
                       rtol=1e-12, atol=1e-12)


@given(seeds)
def test_lsq_gradient(seed):
    f = ScalarField(MESH, _phi(seed))
    vo, vn = _lsq_vectors(MESH, frozenset())
    args = (MESH.owner, MESH.neighbour, MESH.n_internal, vo, vn, f.values, f.face_values())
    assert np.allclose(numba_impl.lsq_gradient(*args), numpy_impl.lsq_gradient(*args),
                       rtol=1e-12, atol=1e-12)


@given(seeds)
def test_neighbour_extrema(seed):
    args = (MESH.owner, MESH.neighbour, MESH.n_internal, _phi(seed))
    for a, b in zip(numba_impl.neighbour_extrema(*args), numpy_impl.neighbour_extrema(*args)):
        assert np.array_equal(a, b)


@given(seeds, st.sampled_from([kernels.SCHEME_UDS, kernels.SCHEME_CDS, kernels.SCHEME_CICSAM,
                               kernels.SCHEME_LB]),
       st.sampled_from([kernels.CORR_UC, kernels.CORR_EC, kernels.CORR_SISC]))
def test_advection_weights(seed, scheme, corr):
    rng = np.random.default_rng(seed)
    n = 300
    phi_c, phi_d, phi_u = rng.random(n), rng.random(n), rng.random(n)
    phi_d[:10] = phi_c[:10]
    co = rng.uniform(0.0, 1.0, n)
    delta = rng.uniform(0.2, 0.8, n)
    mgrad = rng.normal(scale=0.1, size=n)
    gamma = rng.random(n)
    args = (scheme, corr, phi_c, phi_d, phi_u, co, delta, mgrad, gamma)
    a1, r1 = numba_impl.advection_weights(*args)
    a2, r2 = numpy_impl.advection_weights(*args)
    assert np.allclose(a1, a2, rtol=1e-12, atol=1e-14)
    assert np.allclose(r1, r2, rtol=1e-12, atol=1e-14)


@given(seeds)
def test_walk_locate(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.05, 1.05, size=(60, 2))
    hints = rng.integers(0, MESH.n_cells, size=60)
    ptr, fcs, sign = MESH.cell_faces
    lptr, loops = MESH.cell_loops
    g = MESH.geometry
    args = (pts, hints, ptr, fcs, sign, g.face_centres, g.Sf, MESH.owner, MESH.neighbour,
            lptr, loops, MESH.points, 2 * MESH.n_cells)
    assert np.array_equal(numba_impl.walk_locate(*args), numpy_impl.walk_locate(*args))


@given(seeds)
def test_gauss_seidel(seed):
    rng = np.random.default_rng(seed)
    n = 40
    A = sp.random(n, n, density=0.1, random_state=seed % 1000, format="csr")
    A = (A + A.T + sp.eye(n) * (2.0 + abs(A).sum(axis=1).max())).tocsr()
    A.sort_indices()
    b = rng.normal(size=n)
    x0 = rng.normal(size=n)
    x1 = numba_impl.gauss_seidel(A.indptr, A.indices, A.data, b, x0.copy(), 3)
    x2 = numpy_impl.gauss_seidel(A.indptr, A.indices, A.data, b, x0.copy(), 3)
    assert np.allclose(x1, x2, rtol=1e-10, atol=1e-12)


def test_backend_flag_reported():
    assert kernels.BACKEND in ("numba", "numpy")
