"""Vectorised numpy implementations of the hot kernels.

Every function here has a loop twin in ``_numba.py`` with the same signature
and results (to rounding).
"""
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

SCHEME_UDS, SCHEME_CDS, SCHEME_CICSAM, SCHEME_LB = 0, 1, 2, 3
CORR_UC, CORR_EC, CORR_SISC = 0, 1, 2

_DEGENERATE = 1e-12
_CO_MIN = 1e-12


def gauss_gradient(owner, neighbour, n_internal, Sf, phi_face, volumes):
    nc = volumes.shape[0]
    flux = Sf * phi_face[:, None]
    gx = np.bincount(owner, weights=flux[:, 0], minlength=nc)
    gy = np.bincount(owner, weights=flux[:, 1], minlength=nc)
    nb = neighbour[:n_internal]
    gx -= np.bincount(nb, weights=flux[:n_internal, 0], minlength=nc)
    gy -= np.bincount(nb, weights=flux[:n_internal, 1], minlength=nc)
    return np.column_stack((gx / volumes, gy / volumes))


def lsq_gradient(owner, neighbour, n_internal, vec_own, vec_nei, phi, phi_face):
    nc = phi.shape[0]
    own = owner
    nb = neighbour[:n_internal]
    dphi = np.empty(owner.shape[0])
    dphi[:n_internal] = phi[nb] - phi[own[:n_internal]]
    dphi[n_internal:] = phi_face[n_internal:] - phi[own[n_internal:]]
    c_own = vec_own * dphi[:, None]
    gx = np.bincount(own, weights=c_own[:, 0], minlength=nc)
    gy = np.bincount(own, weights=c_own[:, 1], minlength=nc)
    c_nei = vec_nei[:n_internal] * dphi[:n_internal, None]
    gx += np.bincount(nb, weights=c_nei[:, 0], minlength=nc)
    gy += np.bincount(nb, weights=c_nei[:, 1], minlength=nc)
    return np.column_stack((gx, gy))


def neighbour_extrema(owner, neighbour, n_internal, phi):
    mn = phi.copy()
    mx = phi.copy()
    own = owner[:n_internal]
    nb = neighbour[:n_internal]
    np.minimum.at(mn, own, phi[nb])
    np.minimum.at(mn, nb, phi[own])
    np.maximum.at(mx, own, phi[nb])
    np.maximum.at(mx, nb, phi[own])
    return mn, mx


def advection_weights(scheme, correction, phi_c, phi_d, phi_u, co, delta, mgrad, gamma):
    """Implicit face weight a_C and gradient ratio r for every face."""
    dd = phi_d - phi_c
    scale = np.maximum(1.0, np.maximum(np.abs(phi_c), np.abs(phi_d)))
    ok = np.abs(dd) >= _DEGENERATE * scale
    safe = np.where(ok, dd, 1.0)
    r = np.where(ok, (phi_c - phi_u) / safe, 0.0)
    co = np.maximum(co, _CO_MIN)

    if scheme == SCHEME_UDS:
        base = np.zeros_like(dd)
    elif scheme == SCHEME_CDS:
        base = delta.copy()
    elif scheme == SCHEME_LB:
        base = gamma + (1.0 - gamma) * delta
    else:
        den = 1.0 + r
        inside = ok & (np.abs(den) > 0.0)
        nc = np.where(inside, r / np.where(inside, den, 1.0), -1.0)
        inside &= (nc >= 0.0) & (nc < 1.0)
        hc = np.minimum(1.0, nc / co)
        uq = np.minimum(hc, (8.0 * co * nc + (1.0 - co) * (6.0 * nc + 3.0)) / 8.0)
        nf = gamma * hc + (1.0 - gamma) * uq
        base = np.where(inside, (nf - nc) / np.where(inside, 1.0 - nc, 1.0), 0.0)

    if correction != CORR_SISC:
        return base, r
    raw = base + np.where(ok, mgrad / safe, 0.0)
    upper = np.clip(r * (1.0 - co) / co, 0.0, 1.0)
    a = np.minimum(np.maximum(raw, 0.0), upper)
    return a, r


def _cell_contains(px, py, c, loops_ptr, loops, points):
    inside = False
    s, e = loops_ptr[c], loops_ptr[c + 1]
    n = e - s
    for k in range(n):
        ax, ay = points[loops[s + k]]
        bx, by = points[loops[s + (k + 1) % n]]
        if (ay > py) != (by > py):
            xc = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < xc:
                inside = not inside
    return inside


def _walk_one(px, py, hint, cell_face_ptr, cell_faces, face_sign, face_centres,
              Sf, owner, neighbour, loops_ptr, loops, points, max_steps):
    c = hint
    for _ in range(max_steps):
        best = 0.0
        best_face = -1
        for k in range(cell_face_ptr[c], cell_face_ptr[c + 1]):
            f = cell_faces[k]
            s = face_sign[k]
            dist = s * ((px - face_centres[f, 0]) * Sf[f, 0]
                        + (py - face_centres[f, 1]) * Sf[f, 1])
            if dist > best:
                best = dist
                best_face = f
        if best_face < 0:
            if _cell_contains(px, py, c, loops_ptr, loops, points):
                return c
            break
        nxt = neighbour[best_face]
        if nxt < 0:
            return -1
        c = nxt if owner[best_face] == c else owner[best_face]
    n_cells = cell_face_ptr.shape[0] - 1
    for c in range(n_cells):
        if _cell_contains(px, py, c, loops_ptr, loops, points):
            return c
    return -1


def walk_locate(query, hints, cell_face_ptr, cell_faces, face_sign, face_centres,
                Sf, owner, neighbour, loops_ptr, loops, points, max_steps):
    out = np.empty(query.shape[0], dtype=np.int64)
    for i in range(query.shape[0]):
        out[i] = _walk_one(query[i, 0], query[i, 1], hints[i], cell_face_ptr,
                           cell_faces, face_sign, face_centres, Sf, owner,
                           neighbour, loops_ptr, loops, points, max_steps)
    return out


def gauss_seidel(indptr, indices, data, b, x, n_sweeps):
    n = b.shape[0]
    A = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    lower = sp.tril(A, format="csr")
    upper = sp.triu(A, k=1, format="csr")
    x = x.copy()
    for _ in range(n_sweeps):
        x = spsolve_triangular(lower, b - upper @ x, lower=True)
    return x
