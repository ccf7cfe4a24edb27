"""Cell-centred fields, boundary conditions, gradients and point location."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class GradientError(np.linalg.LinAlgError):
    """Least-squares normal matrix is singular."""


@dataclass(frozen=True)
class FixedValue:
    value: float | np.ndarray


@dataclass(frozen=True)
class ZeroGradient:
    pass


def zero_gradient_everywhere(mesh):
    return {name: ZeroGradient() for name in mesh.patches}


@dataclass
class ScalarField:
    mesh: object
    values: np.ndarray
    bcs: dict = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_cells,):
            raise ValueError(f"{self.values.shape[0]} values for {self.mesh.n_cells} cells")
        if self.bcs is None:
            self.bcs = zero_gradient_everywhere(self.mesh)
        missing = set(self.mesh.patches) - set(self.bcs)
        extra = set(self.bcs) - set(self.mesh.patches)
        if missing or extra:
            raise ValueError(f"boundary spec mismatch: missing {sorted(missing)}, unknown {sorted(extra)}")

    def with_values(self, values):
        return ScalarField(self.mesh, np.array(values, dtype=float), dict(self.bcs))

    def copy(self):
        return self.with_values(self.values.copy())

    def face_values(self, weights=None):
        """Linear face values on internal faces plus boundary-condition values."""
        return face_values(self.mesh, self.values, self.bcs, weights)

    def fixed_patches(self):
        return frozenset(k for k, v in self.bcs.items() if isinstance(v, FixedValue))


def face_values(mesh, values, bcs, weights=None):
    ni = mesh.n_internal
    w = mesh.geometry.weights if weights is None else weights
    own, nb = mesh.owner, mesh.neighbour
    out = np.empty(mesh.n_faces)
    out[:ni] = w[:ni] * values[own[:ni]] + (1.0 - w[:ni]) * values[nb[:ni]]
    out[ni:] = values[own[ni:]]
    for name, bc in bcs.items():
        if isinstance(bc, FixedValue):
            out[mesh.patches[name]] = bc.value
    return out


# ---------------------------------------------------------------- gradients

def gauss_gradient(field, mesh=None):
    """Green-Gauss cell gradient with linear face values at the crossing point."""
    mesh = field.mesh if mesh is None else mesh
    g = mesh.geometry
    return kernels.gauss_gradient(mesh.owner, mesh.neighbour, mesh.n_internal, g.Sf,
                                  field.face_values(), g.cell_volumes)


def _lsq_moments(mesh, use):
    d = mesh.geometry.d
    ni = mesh.n_internal
    w = np.where(use, 1.0 / np.einsum("ij,ij->i", d, d), 0.0)
    outer = w[:, None, None] * d[:, :, None] * d[:, None, :]
    M = np.zeros((mesh.n_cells, 2, 2))
    np.add.at(M, mesh.owner, outer)
    np.add.at(M, mesh.neighbour[:ni], outer[:ni])
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    trace = M[:, 0, 0] + M[:, 1, 1]
    return M, det <= 1e-10 * trace * trace


def _lsq_vectors(mesh, fixed):
    key = ("lsq", fixed)
    if key in mesh.cache:
        return mesh.cache[key]
    geo = mesh.geometry
    ni, nf = mesh.n_internal, mesh.n_faces
    own, nb = mesh.owner, mesh.neighbour
    use = np.zeros(nf, dtype=bool)
    use[:ni] = True
    for name in fixed:
        use[mesh.patches[name]] = True
    d = geo.d
    M, bad = _lsq_moments(mesh, use)
    if np.any(bad):
        # rank-deficient stencils (corner triangles) also take their remaining
        # boundary faces, whose values equal phi_P under zero gradient
        use[ni:] |= bad[own[ni:]]
        M, bad = _lsq_moments(mesh, use)
    if np.any(bad):
        raise GradientError(f"collinear least-squares stencil in cell {int(np.argmax(bad))}")
    w = np.where(use, 1.0 / np.einsum("ij,ij->i", d, d), 0.0)
    Minv = np.linalg.inv(M)
    vec_own = np.einsum("fij,fj->fi", Minv[own], w[:, None] * d)
    vec_nei = np.zeros_like(vec_own)
    vec_nei[:ni] = np.einsum("fij,fj->fi", Minv[nb[:ni]], w[:ni, None] * d[:ni])
    mesh.cache[key] = (vec_own, vec_nei)
    return vec_own, vec_nei


def least_squares_gradient(field, mesh=None):
    """Inverse-distance-squared weighted least-squares gradient.

    Stencil: face neighbours plus the face centres of fixed-value patches.
    Exact for affine fields wherever that stencil has full rank; cells where
    it does not also use their zero-gradient boundary faces.
    """
    mesh = field.mesh if mesh is None else mesh
    vec_own, vec_nei = _lsq_vectors(mesh, field.fixed_patches())
    return kernels.lsq_gradient(mesh.owner, mesh.neighbour, mesh.n_internal, vec_own,
                                vec_nei, field.values, field.face_values())


GRADIENTS = {"GG": gauss_gradient, "LSF": least_squares_gradient}


def gradient(field, method):
    try:
        return GRADIENTS[method](field)
    except KeyError:
        raise ValueError(f"unknown gradient method {method!r}") from None


def vector_gradient(grad, mesh, method):
    """Componentwise gradient of a cell vector field; J[c, i, j] = d_j of component i."""
    out = np.empty((mesh.n_cells, 2, 2))
    bcs = zero_gradient_everywhere(mesh)
    for i in range(2):
        out[:, i, :] = gradient(ScalarField(mesh, grad[:, i], bcs), method)
    return out


def interpolate_gradient_to_face(grad_p, grad_n, delta_w):
    """Linear blend at the crossing point: delta_w * grad_P + (1 - delta_w) * grad_N."""
    delta_w = np.asarray(delta_w, dtype=float)
    return delta_w[..., None] * grad_p + (1.0 - delta_w[..., None]) * grad_n


def face_gradient(grad, mesh):
    """Cell gradients interpolated to every face (boundary faces take the owner's)."""
    ni = mesh.n_internal
    own, nb = mesh.owner, mesh.neighbour
    out = np.array(grad[own])
    out[:ni] = interpolate_gradient_to_face(grad[own[:ni]], grad[nb[:ni]],
                                            mesh.geometry.weights[:ni])
    return out


# ---------------------------------------------------------------- search

def point_in_cell(mesh, point, cell):
    """Even-odd point-in-polygon test."""
    poly = mesh.cell_polygon(cell)
    px, py = point
    inside = False
    n = len(poly)
    for k in range(n):
        (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
        if (ay > py) != (by > py):
            if px < ax + (py - ay) * (bx - ax) / (by - ay):
                inside = not inside
    return inside


def locate_points(mesh, points, hints):
    """Face-walk search for many points; -1 marks points outside the domain."""
    points = np.ascontiguousarray(points, dtype=float).reshape(-1, 2)
    hints = np.ascontiguousarray(np.broadcast_to(hints, (points.shape[0],)), dtype=np.int64)
    ptr, fcs, sign = mesh.cell_faces
    lptr, loops = mesh.cell_loops
    g = mesh.geometry
    return kernels.walk_locate(points, hints, ptr, fcs, sign, g.face_centres, g.Sf,
                               mesh.owner, mesh.neighbour, lptr, loops, mesh.points,
                               2 * mesh.n_cells)


def locate_point(mesh, point, hint_cell=0):
    return int(locate_points(mesh, np.asarray(point, dtype=float)[None, :], [hint_cell])[0])
