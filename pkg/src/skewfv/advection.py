"""Face interpolation of an advected scalar: base scheme x skewness correction x gradient.

Face values are written as ``phi_f = phi_C + a_C (phi_D - phi_C)`` with C the
upwind and D the downwind cell of the face; ``a_C`` is computed from
old-time values and applied implicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fields import FixedValue, face_gradient, gradient, locate_points
from .linsys import MatrixAddressing

SCHEMES = {"UDS": kernels.SCHEME_UDS, "CDS": kernels.SCHEME_CDS,
           "CICSAM": kernels.SCHEME_CICSAM, "LB": kernels.SCHEME_LB}
CORRECTIONS = {"UC": kernels.CORR_UC, "EC": kernels.CORR_EC, "SISC": kernels.CORR_SISC}


@dataclass(frozen=True)
class AdvectionSchemeConfig:
    scheme: str = "LB"
    correction: str = "SISC"
    gradient: str = "LSF"
    k_gamma: float = 1.0
    upwind_gradient: str = "auto"
    bounds: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {sorted(SCHEMES)}")
        if self.correction not in CORRECTIONS:
            raise ValueError(f"correction must be one of {sorted(CORRECTIONS)}")
        if self.gradient not in ("GG", "LSF"):
            raise ValueError("gradient must be GG or LSF")
        if self.upwind_gradient not in ("auto", "GG", "LSF"):
            raise ValueError("upwind_gradient must be auto, GG or LSF")

    @property
    def label(self):
        return f"{self.scheme}/{self.correction}/{self.gradient}"


@dataclass
class FaceAdvectionState:
    """Per-internal-face quantities of one advection step."""
    F: np.ndarray
    Co: np.ndarray
    r: np.ndarray
    phi_u: np.ndarray
    a: np.ndarray
    upwind_owner: np.ndarray
    delta: np.ndarray
    correction: np.ndarray

    @property
    def owner_weight(self):
        """Weight of the owner value in the face value implied by ``a``."""
        return np.where(self.upwind_owner, 1.0 - self.a, self.a)

    def tvd_excess(self):
        """Largest violation of 0 <= a <= min(r (1 - Co)/Co, 1)."""
        co = np.maximum(self.Co, 1e-12)
        upper = np.clip(self.r * (1.0 - co) / co, 0.0, 1.0)
        over = np.maximum(self.a - upper, -self.a)
        return float(over.max()) if over.size else 0.0


# ---------------------------------------------------------------- fluxes

def face_flux(u, mesh):
    """Volumetric face flux S_f . u_f (linear interpolation of cell velocities)."""
    g = mesh.geometry
    u = np.asarray(u, dtype=float)
    if u.shape == (2,):
        return g.Sf @ u
    ni = mesh.n_internal
    w = g.weights[:, None]
    uf = np.array(u[mesh.owner])
    uf[:ni] = w[:ni] * u[mesh.owner[:ni]] + (1.0 - w[:ni]) * u[mesh.neighbour[:ni]]
    return np.einsum("ij,ij->i", g.Sf, uf)


def cell_courant(F, mesh, dt):
    """(dt/|V|) * sum of outgoing face fluxes, per cell."""
    nc, ni = mesh.n_cells, mesh.n_internal
    out = np.bincount(mesh.owner, weights=np.maximum(F, 0.0), minlength=nc)
    out += np.bincount(mesh.neighbour[:ni], weights=np.maximum(-F[:ni], 0.0), minlength=nc)
    return dt * out / mesh.geometry.cell_volumes


def face_courant(F, mesh, dt):
    """Cell Courant number of the upwind cell, on every face."""
    co = cell_courant(F, mesh, dt)
    ni = mesh.n_internal
    out = co[mesh.owner].copy()
    up_nei = F[:ni] < 0.0
    out[:ni][up_nei] = co[mesh.neighbour[:ni][up_nei]]
    return out


# ---------------------------------------------------------------- virtual upwind

def upwind_hosts(mesh):
    """Cells hosting the virtual upwind node x_C - d_CD, for both flow directions.

    Returns (host_if_owner_upwind, host_if_neighbour_upwind); -1 when the
    node falls outside the domain.
    """
    if "upwind_hosts" in mesh.cache:
        return mesh.cache["upwind_hosts"]
    g = mesh.geometry
    ni = mesh.n_internal
    own, nb = mesh.owner[:ni], mesh.neighbour[:ni]
    d = g.d[:ni]
    h_own = locate_points(mesh, g.cell_centres[own] - d, own)
    h_nei = locate_points(mesh, g.cell_centres[nb] + d, nb)
    mesh.cache["upwind_hosts"] = (h_own, h_nei)
    return h_own, h_nei


def is_uniform_cartesian(mesh, tol=1e-12):
    g = mesh.geometry
    ni = mesh.n_internal
    if ni == 0:
        return True
    cross = g.d[:ni, 0] * g.Sf[:ni, 1] - g.d[:ni, 1] * g.Sf[:ni, 0]
    vol = g.cell_volumes
    return bool(np.all(np.abs(cross) <= tol * g.magd[:ni] * g.magSf[:ni])
                and np.all(np.abs(g.m[:ni]) <= tol * g.magd[:ni, None])
                and np.ptp(vol) <= tol * vol.max())


def virtual_upwind(phi_d, grad_c, d_cd):
    """Second-order back-projection phi_D - 2 grad(phi)_C . d_CD (unlimited)."""
    return phi_d - 2.0 * np.einsum("...i,...i->...", grad_c, d_cd)


def limit_virtual_upwind(phi_u, host, nb_min, nb_max, bounds):
    """Clamp into the host cell's neighbourhood extrema, or global bounds outside."""
    inside = host >= 0
    h = np.where(inside, host, 0)
    lo = np.where(inside, nb_min[h], bounds[0])
    hi = np.where(inside, nb_max[h], bounds[1])
    return np.minimum(np.maximum(phi_u, lo), hi)


# ---------------------------------------------------------------- weights

def limiter_psi(scheme, r, co, delta, gamma=1.0):
    """Flux limiter Psi of the base scheme (phi_f = phi_C + delta Psi (phi_D - phi_C))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    shape = r.shape
    co, delta, gamma = (np.broadcast_to(np.asarray(v, dtype=float), shape).astype(float)
                        for v in (co, delta, gamma))
    # phi values consistent with r: C=0, D=1, U=-r
    ones = np.ones(shape)
    base, _ = kernels.numpy_impl.advection_weights(
        SCHEMES[scheme], kernels.CORR_UC, np.zeros(shape), ones, -r, co, delta,
        np.zeros(shape), gamma)
    return base / delta


def cicsam_normalised_face(nc, co, gamma):
    """CICSAM face value in normalised variables for one face (scalar inputs)."""
    co = max(co, 1e-12)
    if not 0.0 <= nc <= 1.0:
        return nc
    hc = min(1.0, nc / co)
    uq = min(hc, (8.0 * co * nc + (1.0 - co) * (6.0 * nc + 3.0)) / 8.0)
    return gamma * hc + (1.0 - gamma) * uq


def implicit_weight(psi, delta, mgrad, phi_c, phi_d, correction, r=None, co=None):
    """a_C = delta Psi + m.grad(phi)_f' / (phi_D - phi_C), TVD-clipped under SISC."""
    psi, delta, mgrad, phi_c, phi_d = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (psi, delta, mgrad, phi_c, phi_d)))
    base = delta * psi
    if correction in ("UC", "EC"):
        return base
    dd = phi_d - phi_c
    scale = np.maximum(1.0, np.maximum(np.abs(phi_c), np.abs(phi_d)))
    ok = np.abs(dd) >= 1e-12 * scale
    raw = base + np.where(ok, mgrad / np.where(ok, dd, 1.0), 0.0)
    co = np.maximum(np.asarray(co, dtype=float), 1e-12)
    upper = np.clip(np.asarray(r, dtype=float) * (1.0 - co) / co, 0.0, 1.0)
    return np.minimum(np.maximum(raw, 0.0), upper)


def blending_factor(grad_c, d_cd, k_gamma=1.0):
    """CICSAM blending min(k (cos 2 theta + 1)/2, 1) between interface normal and d_CD."""
    gd = np.einsum("ij,ij->i", grad_c, d_cd)
    g2 = np.einsum("ij,ij->i", grad_c, grad_c) * np.einsum("ij,ij->i", d_cd, d_cd)
    cos2 = np.where(g2 > 0.0, gd * gd / np.where(g2 > 0.0, g2, 1.0), 0.0)
    return np.minimum(k_gamma * cos2, 1.0)


def face_weights(field, F, dt, config):
    """Evaluate a_C on every internal face from the field's current values."""
    mesh = field.mesh
    geo = mesh.geometry
    ni = mesh.n_internal
    own, nb = mesh.owner[:ni], mesh.neighbour[:ni]
    phi = field.values
    Fi = F[:ni]
    up_own = Fi >= 0.0
    C = np.where(up_own, own, nb)
    D = np.where(up_own, nb, own)
    d_cd = np.where(up_own[:, None], geo.d[:ni], -geo.d[:ni])
    delta = np.where(up_own, geo.delta_owner[:ni], 1.0 - geo.delta_owner[:ni])

    grad = gradient(field, config.gradient)
    ug = config.upwind_gradient
    if ug == "auto":
        ug = "GG" if is_uniform_cartesian(mesh) else "LSF"
    grad_u = grad if ug == config.gradient else gradient(field, ug)

    h_own, h_nei = upwind_hosts(mesh)
    host = np.where(up_own, h_own, h_nei)
    nb_min, nb_max = kernels.neighbour_extrema(mesh.owner, mesh.neighbour, ni, phi)
    phi_u = limit_virtual_upwind(virtual_upwind(phi[D], grad_u[C], d_cd), host,
                                 nb_min, nb_max, config.bounds)

    co = face_courant(F, mesh, dt)[:ni]
    corr = np.einsum("ij,ij->i", geo.m[:ni], face_gradient(grad, mesh)[:ni])
    gamma = blending_factor(grad[C], d_cd, config.k_gamma)
    a, r = kernels.advection_weights(SCHEMES[config.scheme], CORRECTIONS[config.correction],
                                     phi[C], phi[D], phi_u, co, delta, corr, gamma)
    return FaceAdvectionState(F=F.copy(), Co=co, r=r, phi_u=phi_u, a=a,
                              upwind_owner=up_own, delta=delta, correction=corr)


# ---------------------------------------------------------------- assembly

def advection_operator(mesh, state, bcs):
    """Implicit convection operator: (diag, upper, lower) plus boundary source.

    Row c of ``A phi + s`` is the net outflow sum_f F_f phi_f of cell c.
    """
    ni = mesh.n_internal
    F = state.F
    wo = state.owner_weight
    wn = 1.0 - wo
    Fi = F[:ni]
    own, nb = mesh.owner, mesh.neighbour[:ni]
    nc = mesh.n_cells
    diag = np.bincount(own[:ni], weights=Fi * wo, minlength=nc)
    diag -= np.bincount(nb, weights=Fi * wn, minlength=nc)
    upper = Fi * wn
    lower = -Fi * wo

    Fb = F[ni:]
    ob = own[ni:]
    implicit_b = np.ones(Fb.shape, dtype=bool)
    value_b = np.zeros(Fb.shape)
    for name, bc in bcs.items():
        idx = mesh.patches[name] - ni
        if isinstance(bc, FixedValue):
            inflow = Fb[idx] < 0.0
            implicit_b[idx[inflow]] = False
            value_b[idx] = bc.value
    diag += np.bincount(ob, weights=np.where(implicit_b, Fb, 0.0), minlength=nc)
    source = np.bincount(ob, weights=np.where(implicit_b, 0.0, Fb * value_b), minlength=nc)
    return diag, upper, lower, source


def explicit_correction_source(mesh, state):
    """Net outflow of F_f * (m . grad phi_f') per cell, for the EC mode."""
    ni, nc = mesh.n_internal, mesh.n_cells
    q = state.F[:ni] * state.correction
    return (np.bincount(mesh.owner[:ni], weights=q, minlength=nc)
            - np.bincount(mesh.neighbour[:ni], weights=q, minlength=nc))


def assemble_advection(field_old, state, dt, mesh=None, correction="SISC", state_new=None):
    """Crank-Nicolson system (matrix, rhs) for one advection step.

    ``state`` gives the old-time face weights and ``state_new`` (default: the
    same) the weights of the new-time face values.
    """
    mesh = field_old.mesh if mesh is None else mesh
    state_new = state if state_new is None else state_new
    vol = mesh.geometry.cell_volumes
    diag, upper, lower, source = advection_operator(mesh, state, field_old.bcs)
    addr = MatrixAddressing.of(mesh)
    conv = addr.assemble(diag, upper, lower)
    rhs = vol / dt * field_old.values - 0.5 * (conv @ field_old.values) - 0.5 * source
    if state_new is not state:
        diag, upper, lower, source = advection_operator(mesh, state_new, field_old.bcs)
    A = addr.assemble(vol / dt + 0.5 * diag, 0.5 * upper, 0.5 * lower)
    rhs -= 0.5 * source
    if correction == "EC":
        rhs -= 0.5 * (explicit_correction_source(mesh, state)
                      + explicit_correction_source(mesh, state_new))
    return A, rhs
