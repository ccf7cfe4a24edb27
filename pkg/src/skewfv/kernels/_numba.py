"""Loop kernels compiled with numba; twins of ``_numpy.py``."""
import numpy as np
from numba import njit

from ._numpy import (CORR_SISC, SCHEME_CDS, SCHEME_LB, SCHEME_UDS,
                     _CO_MIN, _DEGENERATE)


@njit(cache=True)
def gauss_gradient(owner, neighbour, n_internal, Sf, phi_face, volumes):
    nc = volumes.shape[0]
    g = np.zeros((nc, 2))
    for f in range(owner.shape[0]):
        o = owner[f]
        fx = Sf[f, 0] * phi_face[f]
        fy = Sf[f, 1] * phi_face[f]
        g[o, 0] += fx
        g[o, 1] += fy
        if f < n_internal:
            n = neighbour[f]
            g[n, 0] -= fx
            g[n, 1] -= fy
    for c in range(nc):
        g[c, 0] /= volumes[c]
        g[c, 1] /= volumes[c]
    return g


@njit(cache=True)
def lsq_gradient(owner, neighbour, n_internal, vec_own, vec_nei, phi, phi_face):
    nc = phi.shape[0]
    g = np.zeros((nc, 2))
    for f in range(owner.shape[0]):
        o = owner[f]
        if f < n_internal:
            n = neighbour[f]
            dphi = phi[n] - phi[o]
            g[n, 0] += vec_nei[f, 0] * dphi
            g[n, 1] += vec_nei[f, 1] * dphi
        else:
            dphi = phi_face[f] - phi[o]
        g[o, 0] += vec_own[f, 0] * dphi
        g[o, 1] += vec_own[f, 1] * dphi
    return g


@njit(cache=True)
def neighbour_extrema(owner, neighbour, n_internal, phi):
    mn = phi.copy()
    mx = phi.copy()
    for f in range(n_internal):
        o = owner[f]
        n = neighbour[f]
        if phi[n] < mn[o]:
            mn[o] = phi[n]
        if phi[n] > mx[o]:
            mx[o] = phi[n]
        if phi[o] < mn[n]:
            mn[n] = phi[o]
        if phi[o] > mx[n]:
            mx[n] = phi[o]
    return mn, mx


@njit(cache=True)
def advection_weights(scheme, correction, phi_c, phi_d, phi_u, co, delta, mgrad, gamma):
    nf = phi_c.shape[0]
    a = np.empty(nf)
    r = np.empty(nf)
    for f in range(nf):
        dd = phi_d[f] - phi_c[f]
        scale = max(1.0, abs(phi_c[f]), abs(phi_d[f]))
        ok = abs(dd) >= _DEGENERATE * scale
        rf = (phi_c[f] - phi_u[f]) / dd if ok else 0.0
        cof = max(co[f], _CO_MIN)
        if scheme == SCHEME_UDS:
            base = 0.0
        elif scheme == SCHEME_CDS:
            base = delta[f]
        elif scheme == SCHEME_LB:
            base = gamma[f] + (1.0 - gamma[f]) * delta[f]
        else:
            base = 0.0
            den = 1.0 + rf
            if ok and den != 0.0:
                nc = rf / den
                if nc >= 0.0 and nc < 1.0:
                    hc = min(1.0, nc / cof)
                    uq = min(hc, (8.0 * cof * nc + (1.0 - cof) * (6.0 * nc + 3.0)) / 8.0)
                    nfv = gamma[f] * hc + (1.0 - gamma[f]) * uq
                    base = (nfv - nc) / (1.0 - nc)
        if correction == CORR_SISC:
            raw = base + (mgrad[f] / dd if ok else 0.0)
            upper = rf * (1.0 - cof) / cof
            upper = min(max(upper, 0.0), 1.0)
            base = min(max(raw, 0.0), upper)
        a[f] = base
        r[f] = rf
    return a, r


@njit(cache=True)
def _cell_contains(px, py, c, loops_ptr, loops, points):
    inside = False
    s = loops_ptr[c]
    n = loops_ptr[c + 1] - s
    for k in range(n):
        a = loops[s + k]
        b = loops[s + (k + 1) % n]
        ax, ay = points[a, 0], points[a, 1]
        bx, by = points[b, 0], points[b, 1]
        if (ay > py) != (by > py):
            xc = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < xc:
                inside = not inside
    return inside


@njit(cache=True)
def walk_locate(query, hints, cell_face_ptr, cell_faces, face_sign, face_centres,
                Sf, owner, neighbour, loops_ptr, loops, points, max_steps):
    nq = query.shape[0]
    n_cells = cell_face_ptr.shape[0] - 1
    out = np.empty(nq, dtype=np.int64)
    for i in range(nq):
        px = query[i, 0]
        py = query[i, 1]
        c = hints[i]
        found = -2
        for _ in range(max_steps):
            best = 0.0
            best_face = -1
            for k in range(cell_face_ptr[c], cell_face_ptr[c + 1]):
                f = cell_faces[k]
                dist = face_sign[k] * ((px - face_centres[f, 0]) * Sf[f, 0]
                                       + (py - face_centres[f, 1]) * Sf[f, 1])
                if dist > best:
                    best = dist
                    best_face = f
            if best_face < 0:
                if _cell_contains(px, py, c, loops_ptr, loops, points):
                    found = c
                break
            nxt = neighbour[best_face]
            if nxt < 0:
                found = -1
                break
            c = nxt if owner[best_face] == c else owner[best_face]
        if found == -2:
            found = -1
            for cc in range(n_cells):
                if _cell_contains(px, py, cc, loops_ptr, loops, points):
                    found = cc
                    break
        out[i] = found
    return out


@njit(cache=True)
def gauss_seidel(indptr, indices, data, b, x, n_sweeps):
    n = b.shape[0]
    x = x.copy()
    for _ in range(n_sweeps):
        for i in range(n):
            acc = b[i]
            diag = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if j == i:
                    diag = data[k]
                else:
                    acc -= data[k] * x[j]
            x[i] = acc / diag
    return x
