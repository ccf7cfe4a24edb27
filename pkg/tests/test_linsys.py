import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from skewfv.linsys import (METHODS, MatrixAddressing, SolverError, SparseSystem, scaled_residual,
                           solve)


def _laplacian_system(mesh, shift=1.0):
    ni = mesh.n_internal
    addr = MatrixAddressing.of(mesh)
    c = np.ones(ni)
    diag = shift + np.bincount(mesh.owner[:ni], weights=c, minlength=mesh.n_cells) \
        + np.bincount(mesh.neighbour[:ni], weights=c, minlength=mesh.n_cells)
    A = addr.assemble(diag, -c, -c)
    b = np.linspace(0.0, 1.0, mesh.n_cells)
    return A, b


def test_assembly_matches_dense(chevron):
    ni = chevron.n_internal
    rng = np.random.default_rng(0)
    diag = rng.random(chevron.n_cells)
    up = rng.random(ni)
    lo = rng.random(ni)
    A = MatrixAddressing.of(chevron).assemble(diag, up, lo).toarray()
    D = np.diag(diag)
    for f in range(ni):
        o, n = chevron.owner[f], chevron.neighbour[f]
        D[o, n] += up[f]
        D[n, o] += lo[f]
    assert np.array_equal(A, D)


@pytest.mark.parametrize("method", METHODS)
def test_solvers_agree_with_reference(chevron, method):
    A, b = _laplacian_system(chevron)
    ref = spsolve(A.tocsc(), b)
    res = solve(SparseSystem(A, b), method, tol=1e-12, max_iter=5000)
    assert np.allclose(res.x, ref, atol=1e-9)
    assert res.residual <= 1e-12
    assert res.method == method


def test_residual_history_recorded(chevron):
    A, b = _laplacian_system(chevron)
    res = solve(SparseSystem(A, b), "bicgstab", tol=1e-12)
    assert len(res.residuals) == res.iterations + 1
    assert res.residuals[-1] <= 1e-12
    assert np.isclose(scaled_residual(A, res.x, b), res.residual, rtol=1e-6, atol=1e-15)


def test_initial_guess_already_converged(chevron):
    A, b = _laplacian_system(chevron)
    x = spsolve(A.tocsc(), b)
    res = solve(SparseSystem(A, b, x), "bicgstab", tol=1e-8)
    assert res.iterations == 0


def test_zero_diagonal_rejected():
    A = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 2.0]]))
    with pytest.raises(SolverError):
        solve(SparseSystem(A, np.ones(2)))


def test_non_convergence_reported(chevron):
    A, b = _laplacian_system(chevron, shift=1e-3)
    with pytest.raises(SolverError) as err:
        solve(SparseSystem(A, b), "gauss-seidel", tol=1e-14, max_iter=3)
    assert len(err.value.residuals) == 4


def test_unknown_method(chevron):
    A, b = _laplacian_system(chevron)
    with pytest.raises(ValueError):
        solve(SparseSystem(A, b), "cg")
