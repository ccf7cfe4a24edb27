"""Time stepping of the phase fraction and of the CST species concentration.

Convention: ``alpha`` is the liquid volume fraction, and at equilibrium the
gas-side concentration is ``H`` times the liquid-side one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from .advection import (AdvectionSchemeConfig, advection_operator, assemble_advection,
                        face_weights)
from .diffusion import SnGradConfig, diffusion_operator, face_coefficient, face_sngrad
from .fields import ScalarField, gauss_gradient
from .linsys import MatrixAddressing, SolveResult, SparseSystem, scaled_residual, solve


@dataclass(frozen=True)
class CstPhysics:
    D_g: float
    D_l: float
    H: float
    u: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.D_g <= 0.0 or self.D_l <= 0.0:
            raise ValueError("diffusivities must be positive")
        if self.H <= 0.0:
            raise ValueError("Henry coefficient must be positive")


@dataclass
class StepReport:
    min: float
    max: float
    mass: float
    mass_change: float
    iterations: int = 0
    residual: float = 0.0
    tvd_excess: float = 0.0
    extra: dict = field(default_factory=dict)


def harmonic_diffusivity(alpha, D1, D2):
    """1 / (alpha/D1 + (1 - alpha)/D2), alpha the phase-1 fraction."""
    alpha = np.asarray(alpha, dtype=float)
    return 1.0 / (alpha / D1 + (1.0 - alpha) / D2)


def henry_fraction(alpha, H):
    """alpha H / (alpha H + 1 - alpha), the liquid fraction weighted by the jump."""
    alpha = np.asarray(alpha, dtype=float)
    return alpha * H / (alpha * H + 1.0 - alpha)


def cst_K(alpha, H):
    alpha = np.asarray(alpha, dtype=float)
    return (H - 1.0) / (1.0 + alpha * (H - 1.0))


def gas_concentration(c, alpha, H):
    """Gas-side concentration of a mixed cell split by the equilibrium jump."""
    return np.asarray(c) * H / (alpha + H * (1.0 - alpha))


def equilibrium_check(c, alpha, H, tol=1e-6):
    """Ratio of the gas-phase to liquid-phase average concentration.

    Phase averages are weighted by the phase volume fraction of each cell,
    with mixed cells split by the equilibrium jump.
    """
    c = np.asarray(c, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    gas = alpha < tol
    liq = alpha > 1.0 - tol
    cg = c[gas].mean() if gas.any() else np.nan
    cl = c[liq].mean() if liq.any() else np.nan
    ratio = cg / cl if cl != 0.0 else np.inf
    return {"c_gas": float(cg), "c_liquid": float(cl), "ratio": float(ratio),
            "H": float(H), "relative_deviation": float(abs(ratio / H - 1.0))}


# ---------------------------------------------------------------- phase fraction

def step_alpha(alpha_old, F, dt, config=AdvectionSchemeConfig(), solver="bicgstab",
               tol=1e-12, state=None, max_outer=4, outer_tol=1e-8):
    """One Crank-Nicolson step of the phase-fraction equation.

    The old-time face values use weights from alpha_old. The new-time face
    values use weights re-evaluated from the latest iterate, repeated until
    the iterate changes by less than ``outer_tol`` or ``max_outer`` solves
    were made (``max_outer=1`` keeps the old weights for both levels).
    Returns (alpha_new, StepReport, FaceAdvectionState of the old level).
    """
    mesh = alpha_old.mesh
    vol = mesh.geometry.cell_volumes
    if state is None:
        state = face_weights(alpha_old, F, dt, config)
    state_new = state
    x = alpha_old.values
    iters = 0
    tvd = state.tvd_excess() if config.correction == "SISC" else 0.0
    for k in range(max(1, max_outer)):
        A, rhs = assemble_advection(alpha_old, state, dt, correction=config.correction,
                                    state_new=state_new)
        res = solve(SparseSystem(A, rhs, x), solver, tol=tol)
        iters += res.iterations
        change = float(np.max(np.abs(res.x - x))) if k else np.inf
        x = res.x
        if change <= outer_tol or k + 1 == max_outer:
            break
        state_new = face_weights(alpha_old.with_values(x), F, dt, config)
        if config.correction == "SISC":
            tvd = max(tvd, state_new.tvd_excess())
    new = alpha_old.with_values(x)
    m0 = float(vol @ alpha_old.values)
    m1 = float(vol @ x)
    rep = StepReport(min=float(x.min()), max=float(x.max()), mass=m1,
                     mass_change=m1 - m0, iterations=iters, residual=res.residual,
                     tvd_excess=tvd, extra={"outer": k + 1, "outer_change": change})
    return new, rep, state


# ---------------------------------------------------------------- species

class SpeciesStepper:
    """Implicit CST species transport on a fixed mesh.

    Diffusion and the Henry term are fully implicit in c at the new time
    level; the convective part reuses the face weights of the phase-fraction
    step. ``time_scheme`` is ``euler`` or ``bdf2`` (stagnant cases only).

    ``diffusivity="cell"`` interpolates the cell values of <D>_h and K c
    linearly to the faces; ``"face"`` evaluates both from the interpolated
    face phase fraction, K(alpha_f) c_f.

    ``k_phase="gas"`` evaluates K from the gas fraction 1 - alpha, which
    makes c = alpha c_l + (1 - alpha) H c_l a discrete steady state for any
    cell fractions. ``"liquid"`` evaluates K from alpha itself; both give
    the same jump H between pure phases.

    ``weighting="henry"`` evaluates <D>_h at the jump-weighted fraction
    :func:`henry_fraction`, so a face on a planar interface carries the
    series resistance of its two half cells. ``"volume"`` uses alpha itself;
    both coincide for H = 1.
    """

    def __init__(self, c0, physics, config=SnGradConfig(), dt=1e-3, time_scheme="euler",
                 n_corr=2, solver="direct", tol=1e-12, diffusivity="face", alpha_config=None,
                 k_phase="gas", weighting="henry"):
        if time_scheme not in ("euler", "bdf2"):
            raise ValueError("time_scheme must be euler or bdf2")
        if diffusivity not in ("face", "cell"):
            raise ValueError("diffusivity must be face or cell")
        if k_phase not in ("gas", "liquid"):
            raise ValueError("k_phase must be gas or liquid")
        if weighting not in ("henry", "volume"):
            raise ValueError("weighting must be henry or volume")
        self.k_phase = k_phase
        self.weighting = weighting
        self.c = c0.copy()
        self.mesh = c0.mesh
        self.physics = physics
        self.config = config
        self.dt = float(dt)
        self.time_scheme = time_scheme
        self.n_corr = max(1, int(n_corr))
        self.solver = solver
        self.tol = tol
        self.diffusivity = diffusivity
        self.alpha_config = config if alpha_config is None else alpha_config
        self.c_prev = None
        self.time = 0.0
        self._lu = None
        self._lu_data = None

    def _D(self, a):
        ph = self.physics
        if self.weighting == "henry":
            a = henry_fraction(a, ph.H)
        return harmonic_diffusivity(a, ph.D_l, ph.D_g)

    def _K(self, a):
        return cst_K(1.0 - a if self.k_phase == "gas" else a, self.physics.H)

    # face coefficients from the new-time phase fraction
    def face_coefficients(self, alpha):
        """Face diffusivity and the (owner, neighbour) factors of (K c)_f per c value."""
        mesh = self.mesh
        ni = mesh.n_internal
        w = mesh.geometry.weights[:ni]
        if self.diffusivity == "face":
            a_f = np.clip(alpha.face_values(), 0.0, 1.0)
            D_f = self._D(a_f)
            K_f = self._K(a_f[:ni])
            return D_f, w * K_f, (1.0 - w) * K_f
        a = np.clip(alpha.values, 0.0, 1.0)
        D_f = face_coefficient(self._D(a), mesh)
        K = self._K(a)
        return D_f, w * K[mesh.owner[:ni]], (1.0 - w) * K[mesh.neighbour[:ni]]

    def _solve(self, A, rhs, x0):
        if self.solver != "direct":
            return solve(SparseSystem(A, rhs, x0), self.solver, tol=self.tol)
        A = A.tocsc()
        if self._lu is None or self._lu_data is None or not (
                self._lu_data.shape == A.data.shape and np.array_equal(self._lu_data, A.data)):
            self._lu = splu(A)
            self._lu_data = A.data.copy()
        x = self._lu.solve(rhs)
        return SolveResult(x, [scaled_residual(A, x, rhs)], 1, "direct")

    def step(self, alpha, adv_state=None, adv_dt=None):
        """Advance c by one step with the new-time phase fraction ``alpha``."""
        mesh = self.mesh
        ni, nc = mesh.n_internal, mesh.n_cells
        own, nb = mesh.owner, mesh.neighbour[:ni]
        vol = mesh.geometry.cell_volumes
        dt = self.dt if adv_dt is None else adv_dt
        cfg = self.config
        c_old = self.c.values
        moving = adv_state is not None and np.any(adv_state.F != 0.0)
        bdf2 = self.time_scheme == "bdf2" and self.c_prev is not None
        if bdf2 and moving:
            raise ValueError("bdf2 is only available for stagnant cases")

        D_f, kp, kn = self.face_coefficients(alpha)
        q = D_f[:ni] * face_sngrad(alpha, self.alpha_config)[:ni]

        if bdf2:
            a0 = 1.5
            rhs_t = vol / dt * (2.0 * c_old - 0.5 * self.c_prev)
        else:
            a0 = 1.0
            rhs_t = vol / dt * c_old

        if moving:
            adiag, aup, alow, asrc = advection_operator(mesh, adv_state, self.c.bcs)
            conv = MatrixAddressing.of(mesh).assemble(adiag, aup, alow)
            rhs_t = rhs_t - 0.5 * (conv @ c_old) - asrc
        else:
            adiag = np.zeros(nc)
            aup = np.zeros(ni)
            alow = np.zeros(ni)

        # Henry term: -sum_f q_f (K c)_f, with (K c)_f = kp c_P + kn c_N
        kdiag = -np.bincount(own[:ni], weights=q * kp, minlength=nc)
        kdiag += np.bincount(nb, weights=q * kn, minlength=nc)
        kup = -q * kn
        klow = q * kp

        addr = MatrixAddressing.of(mesh)
        it = self.c.copy()
        explicit = cfg.mode != "UC" or cfg.coefficient == "CDS-EC"
        n_iter = self.n_corr if explicit else 1
        total_iters = 0
        for _ in range(n_iter):
            ddiag, dup, dlow, dsrc, dstate = diffusion_operator(it, D_f, cfg)
            src = dsrc.copy()
            if cfg.coefficient == "CDS-EC":
                kc = self._K(np.clip(alpha.values, 0.0, 1.0)) * it.values
                g = gauss_gradient(ScalarField(mesh, kc, it.bcs))
                corr = face_coefficient(kc, mesh, "CDS-EC", grad=g)[:ni] - \
                    face_coefficient(kc, mesh, "CDS-UC")[:ni]
                e = q * corr
                src += np.bincount(own[:ni], weights=e, minlength=nc)
                src -= np.bincount(nb, weights=e, minlength=nc)
            A = addr.assemble(a0 * vol / dt + 0.5 * adiag + ddiag + kdiag,
                              0.5 * aup + dup + kup, 0.5 * alow + dlow + klow)
            res = self._solve(A, rhs_t + src, it.values)
            total_iters += res.iterations
            it = it.with_values(res.x)

        m0 = float(vol @ c_old)
        m1 = float(vol @ it.values)
        self.c_prev = c_old.copy()
        self.c = it
        self.time += dt
        self.last_state = dstate
        return it, StepReport(min=float(it.values.min()), max=float(it.values.max()),
                              mass=m1, mass_change=m1 - m0, iterations=total_iters,
                              residual=res.residual)


def step_species(c_old, alpha_new, physics, dt, config=SnGradConfig(), adv_state=None,
                 n_corr=2, solver="direct"):
    """Single backward-Euler species step; see :class:`SpeciesStepper`."""
    st = SpeciesStepper(c_old, physics, config, dt, "euler", n_corr, solver)
    return st.step(alpha_new, adv_state)
