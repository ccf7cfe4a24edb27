"""Sparse systems over cells and the iterative solvers used by the steppers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import bicgstab, splu

from . import kernels

METHODS = ("bicgstab", "gauss-seidel", "direct")


class SolverError(RuntimeError):
    def __init__(self, msg, residuals=()):
        super().__init__(msg)
        self.residuals = list(residuals)


class MatrixAddressing:
    """CSR sparsity pattern of the compact owner/neighbour stencil.

    ``assemble`` scatters diagonal, upper (row owner, column neighbour) and
    lower (row neighbour, column owner) coefficients into a fresh matrix.
    """

    def __init__(self, mesh):
        nc, ni = mesh.n_cells, mesh.n_internal
        own, nb = mesh.owner[:ni], mesh.neighbour[:ni]
        rows = np.concatenate([np.arange(nc), own, nb])
        cols = np.concatenate([np.arange(nc), nb, own])
        ids = np.arange(rows.size, dtype=float) + 1.0
        A = sp.csr_matrix((ids, (rows, cols)), shape=(nc, nc))
        A.sort_indices()
        if A.nnz != rows.size:
            raise ValueError("two faces connect the same pair of cells")
        pos = np.empty(rows.size, dtype=np.int64)
        pos[A.data.astype(np.int64) - 1] = np.arange(A.nnz)
        self.n = nc
        self.indptr = A.indptr.copy()
        self.indices = A.indices.copy()
        self.diag_pos = pos[:nc]
        self.upper_pos = pos[nc:nc + ni]
        self.lower_pos = pos[nc + ni:]

    @classmethod
    def of(cls, mesh):
        if "addressing" not in mesh.cache:
            mesh.cache["addressing"] = cls(mesh)
        return mesh.cache["addressing"]

    def assemble(self, diag, upper, lower):
        data = np.empty(self.indices.size)
        data[self.diag_pos] = diag
        data[self.upper_pos] = upper
        data[self.lower_pos] = lower
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    x0: np.ndarray | None = None


@dataclass
class SolveResult:
    x: np.ndarray
    residuals: list = field(default_factory=list)
    iterations: int = 0
    method: str = ""

    @property
    def residual(self):
        return self.residuals[-1] if self.residuals else 0.0


def scaled_residual(A, x, b):
    """Jacobi-scaled relative residual ||D^-1 (b - A x)|| / ||D^-1 b||."""
    dinv = 1.0 / A.diagonal()
    ref = np.linalg.norm(dinv * b)
    res = np.linalg.norm(dinv * (b - A @ x))
    if ref == 0.0:
        return res
    return res / ref


def solve(system, method="bicgstab", tol=1e-10, max_iter=1000):
    A = sp.csr_matrix(system.matrix)
    b = np.asarray(system.rhs, dtype=float)
    diag = A.diagonal()
    if np.any(diag == 0.0) or not np.all(np.isfinite(diag)):
        raise SolverError("zero or non-finite diagonal entry")
    x0 = np.zeros_like(b) if system.x0 is None else np.asarray(system.x0, dtype=float)
    history = [scaled_residual(A, x0, b)]
    if history[0] <= tol:
        return SolveResult(x0.copy(), history, 0, method)

    if method == "direct":
        x = splu(A.tocsc()).solve(b)
        history.append(scaled_residual(A, x, b))
        return SolveResult(x, history, 1, method)

    if method == "bicgstab":
        dinv = 1.0 / diag
        As = A.copy()
        As.data *= np.repeat(dinv, np.diff(As.indptr))
        bs = dinv * b
        ref = np.linalg.norm(bs)
        ref = 1.0 if ref == 0.0 else ref

        def record(xk):
            history.append(np.linalg.norm(bs - As @ xk) / ref)

        x, info = bicgstab(As, bs, x0=x0, rtol=tol, atol=0.0, maxiter=max_iter,
                           callback=record)
        final = scaled_residual(A, x, b)
        if info != 0 or final > tol:
            raise SolverError(f"BiCGStab stopped at residual {final:.3e} (info={info})", history)
        if history[-1] != final:
            history.append(final)
        return SolveResult(x, history, len(history) - 1, method)

    if method == "gauss-seidel":
        x = x0.copy()
        for it in range(1, max_iter + 1):
            x = kernels.gauss_seidel(A.indptr, A.indices, A.data, b, x, 1)
            history.append(scaled_residual(A, x, b))
            if history[-1] <= tol:
                return SolveResult(x, history, it, method)
            if not np.isfinite(history[-1]):
                break
        raise SolverError(f"Gauss-Seidel stopped at residual {history[-1]:.3e}", history)

    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
