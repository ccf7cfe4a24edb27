"""Surface-normal gradients UC / NO / NO-NC, the implicit modified diffusivity and
face coefficients for the diffusive terms.

A face term ``T_f`` approximates ``S_f . grad(phi)`` at the face centroid;
the diffusive flux into the owner is ``Gamma_f T_f``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (FixedValue, ScalarField, ZeroGradient, face_gradient, gauss_gradient,
                     gradient, vector_gradient)

MODES = ("UC", "NO", "NO/NC")
COEFFICIENT_MODES = ("CDS-UC", "CDS-EC")
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class SnGradConfig:
    mode: str = "NO"
    splitting: str = "over-relaxed"
    coefficient: str = "CDS-UC"
    gradient: str = "LSF"
    implicit: bool | None = None
    limit: bool = False
    max_ratio: float | None = 100.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.coefficient not in COEFFICIENT_MODES:
            raise ValueError(f"coefficient must be one of {COEFFICIENT_MODES}")
        if self.splitting not in ("over-relaxed", "orthogonal", "minimum"):
            raise ValueError("unknown splitting mode")
        if self.gradient not in ("GG", "LSF"):
            raise ValueError("gradient must be GG or LSF")

    @property
    def implicit_correction(self):
        """Fold the corrections into Gamma_{f,m} instead of deferring them (off by default)."""
        return bool(self.implicit) and self.mode != "UC"

    @property
    def label(self):
        return f"{self.mode}/{self.coefficient}"


@dataclass
class FaceDiffusionState:
    """Per-internal-face diffusion quantities (for diagnostics and tests)."""
    sngrad: np.ndarray
    correction: np.ndarray
    gamma: np.ndarray
    gamma_m: np.ndarray
    implicit: np.ndarray


# ---------------------------------------------------------------- face terms

def sngrad_uncorrected(phi_p, phi_n, magd, magSf):
    return magSf * (phi_n - phi_p) / magd


def sngrad_NO(phi_p, phi_n, Delta, k, grad_fp, magd):
    magD = np.linalg.norm(Delta, axis=-1)
    return magD * (phi_n - phi_p) / magd + np.einsum("...i,...i->...", k, grad_fp)


def nonconjunctional_term(hess_fp, m, Sf):
    """S_f . (grad(grad phi)_f' m) with hess[..., i, j] = d_j (grad phi)_i."""
    return np.einsum("...i,...ij,...j->...", Sf, hess_fp, m)


def sngrad_NONC(phi_p, phi_n, Delta, k, grad_fp, hess_fp, m, Sf, magd):
    return sngrad_NO(phi_p, phi_n, Delta, k, grad_fp, magd) + nonconjunctional_term(hess_fp, m, Sf)


def implicit_diffusivity(gamma_f, phi_p, phi_n, magd, magSf, sngrad, clip=False,
                         max_ratio=None):
    """Gamma_{f,m} with Gamma_{f,m} |S_f| (phi_N - phi_P)/|d| = Gamma_f sngrad.

    Returns (gamma_m, ok). Faces with a degenerate difference, or with
    |Gamma_{f,m}| > max_ratio |Gamma_f| when a cap is given, are flagged and
    carry gamma_f for the caller's explicit fallback.
    """
    gamma_f = np.broadcast_to(np.asarray(gamma_f, dtype=float), np.shape(sngrad))
    dphi = phi_n - phi_p
    scale = np.maximum(1.0, np.maximum(np.abs(phi_p), np.abs(phi_n)))
    ok = np.abs(dphi) >= _DEGENERATE * scale
    uc = magSf * np.where(ok, dphi, 1.0) / magd
    gm = np.where(ok, gamma_f * sngrad / uc, gamma_f)
    if max_ratio is not None:
        ok &= np.abs(gm) <= max_ratio * np.abs(gamma_f)
        gm = np.where(ok, gm, gamma_f)
    if clip:
        gm = np.maximum(gm, 0.0)
    return gm, ok


def face_coefficient(values, mesh, mode="CDS-UC", bcs=None, grad=None):
    """Linear face interpolation of a cell coefficient, optionally corrected to x_f.

    CDS-EC adds m . (grad)_f' with the Gauss gradient of the coefficient.
    """
    bcs = {} if bcs is None else bcs
    fld = ScalarField(mesh, values, {p: bcs.get(p, ZeroGradient()) for p in mesh.patches})
    out = fld.face_values()
    if mode == "CDS-EC":
        g = gauss_gradient(fld) if grad is None else grad
        out = out + np.einsum("ij,ij->i", mesh.geometry.m, face_gradient(g, mesh))
    elif mode != "CDS-UC":
        raise ValueError(f"unknown coefficient mode {mode!r}")
    return out


# ---------------------------------------------------------------- assembly

def face_terms(field, config, grad=None):
    """Implicit coefficient per unit Gamma and explicit remainder on every face.

    ``T_f = coeff_f (phi_N - phi_P) + corr_f`` on internal faces and
    ``T_f = coeff_f (g - phi_P) + corr_f`` on fixed-value boundary faces.
    """
    mesh = field.mesh
    geo = mesh.geometry
    ni = mesh.n_internal
    Delta, k = geo.split(config.splitting)
    if config.mode == "UC":
        coeff = geo.magSf / geo.magd
        corr = np.zeros(mesh.n_faces)
        return coeff, corr
    magD = np.linalg.norm(Delta, axis=1)
    coeff = magD / geo.magd
    if grad is None:
        grad = gradient(field, config.gradient)
    gf = face_gradient(grad, mesh)
    corr = np.einsum("ij,ij->i", k, gf)
    if config.mode == "NO/NC":
        hess = vector_gradient(grad, mesh, config.gradient)
        own, nb = mesh.owner[:ni], mesh.neighbour[:ni]
        w = geo.weights[:ni, None, None]
        hf = w * hess[own] + (1.0 - w) * hess[nb]
        corr[:ni] += nonconjunctional_term(hf, geo.m[:ni], geo.Sf[:ni])
    return coeff, corr


def face_sngrad(field, config, grad=None):
    """T_f on every face (zero on zero-gradient boundary faces)."""
    mesh = field.mesh
    ni = mesh.n_internal
    coeff, corr = face_terms(field, config, grad)
    phi = field.values
    fv = field.face_values()
    t = np.zeros(mesh.n_faces)
    t[:ni] = coeff[:ni] * (phi[mesh.neighbour[:ni]] - phi[mesh.owner[:ni]]) + corr[:ni]
    for name, bc in field.bcs.items():
        if isinstance(bc, FixedValue):
            idx = mesh.patches[name]
            t[idx] = coeff[idx] * (fv[idx] - phi[mesh.owner[idx]]) + corr[idx]
    return t


def diffusion_operator(field, gamma_f, config, grad=None):
    """Operator L and source s such that L phi - s = -sum_f Gamma_f T_f per cell.

    Returns (diag, upper, lower, source, FaceDiffusionState). Coefficients
    are evaluated from ``field`` (the current iterate).
    """
    mesh = field.mesh
    geo = mesh.geometry
    ni, nc = mesh.n_internal, mesh.n_cells
    own, nb = mesh.owner, mesh.neighbour[:ni]
    gamma_f = np.broadcast_to(np.asarray(gamma_f, dtype=float), (mesh.n_faces,))
    coeff, corr = face_terms(field, config, grad)
    phi = field.values

    gi = gamma_f[:ni]
    c_imp = gi * coeff[:ni]
    e = gi * corr[:ni]
    implicit = np.zeros(ni, dtype=bool)
    gamma_m = gi.copy()
    sn = coeff[:ni] * (phi[nb] - phi[own[:ni]]) + corr[:ni]
    if config.implicit_correction:
        gm, ok = implicit_diffusivity(gi, phi[own[:ni]], phi[nb], geo.magd[:ni],
                                      geo.magSf[:ni], sn, clip=config.limit,
                                      max_ratio=config.max_ratio)
        implicit = ok
        gamma_m = gm
        uc = geo.magSf[:ni] / geo.magd[:ni]
        c_imp = np.where(ok, gm * uc, c_imp)
        e = np.where(ok, 0.0, e)

    diag = np.bincount(own[:ni], weights=c_imp, minlength=nc)
    diag += np.bincount(nb, weights=c_imp, minlength=nc)
    upper = -c_imp
    lower = -c_imp.copy()
    source = np.bincount(own[:ni], weights=e, minlength=nc)
    source -= np.bincount(nb, weights=e, minlength=nc)

    fv = field.face_values()
    for name, bc in field.bcs.items():
        if isinstance(bc, FixedValue):
            idx = mesh.patches[name]
            cb = gamma_f[idx] * coeff[idx]
            ob = own[idx]
            diag += np.bincount(ob, weights=cb, minlength=nc)
            source += np.bincount(ob, weights=cb * fv[idx] + gamma_f[idx] * corr[idx],
                                  minlength=nc)
    state = FaceDiffusionState(sngrad=sn, correction=corr[:ni], gamma=gi.copy(),
                               gamma_m=gamma_m, implicit=implicit)
    return diag, upper, lower, source, state
