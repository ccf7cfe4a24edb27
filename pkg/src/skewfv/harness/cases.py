"""The verification cases: plug flow, circle translation, planar diffusion and
mesh-convergence studies."""
from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..advection import AdvectionSchemeConfig, cell_courant, face_flux
from ..diffusion import SnGradConfig
from ..fields import FixedValue, ScalarField, ZeroGradient
from ..linsys import SolverError
from ..mesh import (build_cartesian, build_triangular, distort_random, distort_systematic,
                    mean_cell_width, quality_report)
from ..oracle import Oracle1DSpec, solve_reference
from ..polygons import cell_average, clip_halfplane, polygon_area
from ..transport import CstPhysics, SpeciesStepper, step_alpha
from . import metrics
from .sampling import line_cells, sample_line


@dataclass
class RunArtifacts:
    kind: str
    summary: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    table: list = field(default_factory=list)
    fields: dict = field(default_factory=dict)

    @property
    def violations(self):
        return self.summary.get("violations", [])


# ---------------------------------------------------------------- meshes

def build_mesh(family, nx, ny, Lx, Ly, beta=0.25, seed=1):
    if family == "uniform":
        return build_cartesian(nx, ny, Lx, Ly)
    if family == "chevron":
        return distort_systematic(build_cartesian(nx, ny, Lx, Ly), beta)
    if family == "random_quad":
        return distort_random(build_cartesian(nx, ny, Lx, Ly), beta, seed)
    if family == "triangular":
        return distort_random(build_triangular(nx, ny, Lx, Ly, seed=seed), beta, seed)
    raise ValueError(f"unknown mesh family {family!r}")


def mesh_for(spec):
    return build_mesh(spec.mesh, spec.nx, spec.ny, spec.Lx, spec.Ly, spec.beta, spec.seed)


def halfplane_fractions(mesh, normal, offset):
    """Exact area fraction of every cell with normal . x <= offset."""
    out = np.empty(mesh.n_cells)
    vol = mesh.geometry.cell_volumes
    for c in range(mesh.n_cells):
        out[c] = polygon_area(clip_halfplane(mesh.cell_polygon(c), normal, offset)) / vol[c]
    return np.clip(out, 0.0, 1.0)


def slab_fractions(mesh, x0, x1):
    """Exact area fraction of every cell inside x0 <= x <= x1."""
    out = np.empty(mesh.n_cells)
    vol = mesh.geometry.cell_volumes
    for c in range(mesh.n_cells):
        p = clip_halfplane(mesh.cell_polygon(c), (1.0, 0.0), x1)
        if len(p) >= 3:
            p = clip_halfplane(p, (-1.0, 0.0), -x0)
        out[c] = polygon_area(p) / vol[c] if len(p) >= 3 else 0.0
    return np.clip(out, 0.0, 1.0)


def circle_fractions(mesh, centre, radius, n=16):
    """Sub-sampled area fraction of a disc in every cell; far cells are skipped."""
    cen = np.asarray(centre, dtype=float)
    pts = mesh.points
    ptr, loops = mesh.cell_loops
    out = np.zeros(mesh.n_cells)
    for c in range(mesh.n_cells):
        poly = pts[loops[ptr[c]:ptr[c + 1]]]
        r = np.sqrt(np.sum((poly - cen) ** 2, axis=1))
        if r.min() > radius + 1e-12 and not _point_in_poly(cen, poly):
            # disc can still clip an edge between two far vertices
            if _segment_distance(cen, poly) > radius:
                continue
        if r.max() <= radius:
            out[c] = 1.0
            continue
        out[c] = cell_average(poly, lambda p: (np.sum((p - cen) ** 2, axis=1)
                                                       <= radius * radius).astype(float), n)
    return out


def _point_in_poly(p, poly):
    inside = False
    n = len(poly)
    for k in range(n):
        (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
        if (ay > p[1]) != (by > p[1]) and p[0] < ax + (p[1] - ay) * (bx - ax) / (by - ay):
            inside = not inside
    return inside


def _segment_distance(p, poly):
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
    q = a + t[:, None] * ab
    return float(np.sqrt(np.min(np.sum((q - p) ** 2, axis=1))))


def _line(spec, default):
    frac = spec.line if spec.line else default
    x0, y0, x1, y1 = frac
    return (x0 * spec.Lx, y0 * spec.Ly), (x1 * spec.Lx, y1 * spec.Ly)


def _centre_row_fraction(ny):
    """y fraction of a cell-centre row next to the mid-plane."""
    return (ny // 2 + 0.5) / ny


# ---------------------------------------------------------------- advection

def advection_config(spec):
    return AdvectionSchemeConfig(spec.scheme, spec.correction, spec.gradient, spec.k_gamma)


def advect(mesh, alpha0, bcs, velocity, distance, spec, on_step=None):
    """March alpha over ``distance`` with Co <= spec.courant; returns (alpha, log, status)."""
    cfg = advection_config(spec)
    F = face_flux(np.asarray(velocity, dtype=float), mesh)
    co_unit = cell_courant(F, mesh, 1.0).max()
    speed = float(np.hypot(*velocity))
    if co_unit == 0.0 or speed == 0.0 or distance == 0.0:
        return alpha0, [], "ok", 0.0
    n_steps = max(1, math.ceil(distance / speed * co_unit / spec.courant))
    dt = distance / speed / n_steps
    alpha = ScalarField(mesh, alpha0, bcs)
    log = []
    status = "ok"
    for k in range(1, n_steps + 1):
        try:
            alpha, rep, state = step_alpha(alpha, F, dt, cfg, spec.solver, spec.tol)
        except SolverError as exc:
            status = f"solver failure at step {k}: {exc}"
            break
        if not np.all(np.isfinite(alpha.values)):
            status = f"non-finite values at step {k}"
            break
        log.append({"step": k, "time": k * dt, "min": rep.min, "max": rep.max,
                    "mass": rep.mass, "tvd_excess": rep.tvd_excess,
                    "iterations": rep.iterations, "residual": rep.residual})
        if on_step is not None:
            on_step(k, alpha, rep, state)
    return alpha.values, log, status, dt


def _advection_summary(spec, log, status, dt, mass0, tol=1e-6):
    lo = min((r["min"] for r in log), default=np.nan)
    hi = max((r["max"] for r in log), default=np.nan)
    tvd = max((r["tvd_excess"] for r in log), default=0.0)
    mass_err = max((abs(r["mass"] - mass0) for r in log), default=0.0)
    viol = []
    if status != "ok":
        viol.append(status)
    bounded = status == "ok" and lo >= -tol and hi <= 1.0 + tol
    if spec.correction == "SISC":
        if not bounded:
            viol.append(f"alpha left [-{tol:g}, 1+{tol:g}]: min {lo:.3e}, max {hi:.3e}")
        if tvd > 1e-12:
            viol.append(f"TVD bound exceeded by {tvd:.3e}")
    return {"scheme": advection_config(spec).label, "steps": len(log), "dt": dt,
            "status": status, "min_alpha": lo, "max_alpha": hi, "bounded": bounded,
            "overshoot": metrics.bound_violation(lo, hi) if log else np.nan,
            "max_tvd_excess": tvd, "max_mass_drift": mass_err, "violations": viol}


def run_plug_flow(spec):
    """Slab of alpha = 1 carried to the right through the mesh."""
    t0 = time.perf_counter()
    mesh = mesh_for(spec)
    x0, x1 = spec.slab[0] * spec.Lx, spec.slab[1] * spec.Lx
    alpha0 = slab_fractions(mesh, x0, x1)
    bcs = {"left": FixedValue(0.0), "right": ZeroGradient(),
           "bottom": ZeroGradient(), "top": ZeroGradient()}
    distance = spec.travel * spec.Lx
    alpha, log, status, dt = advect(mesh, alpha0, bcs, spec.velocity, distance, spec)
    ux, uy = spec.velocity
    shift = distance * ux / math.hypot(ux, uy)
    exact = slab_fractions(mesh, x0 + shift, x1 + shift)
    vol = mesh.geometry.cell_volumes
    summ = _advection_summary(spec, log, status, dt, float(vol @ alpha0))
    p0, p1 = _line(spec, (0.0, _centre_row_fraction(spec.ny), 1.0, _centre_row_fraction(spec.ny)))
    rows = sample_line(alpha, mesh, p0, p1, spec.n_samples)
    ex = sample_line(exact, mesh, p0, p1, spec.n_samples)
    summ.update({"l1_error": metrics.l1_shape_error(mesh, alpha, exact),
                 "interface_cells": metrics.interface_cells(alpha),
                 "interface_cells_initial": metrics.interface_cells(alpha0),
                 "runtime_s": time.perf_counter() - t0,
                 "mesh_quality": quality_report(mesh)})
    return RunArtifacts("plug_flow", summ,
                        {"L1": [r + (e[-1],) for r, e in zip(rows, ex)]}, log,
                        fields={"alpha": alpha, "alpha_exact": exact, "mesh": mesh})


def run_circle_translation(spec):
    """Disc translated over spec.distance_diameters diameters."""
    t0 = time.perf_counter()
    mesh = mesh_for(spec)
    dx = spec.Lx / spec.nx
    D = spec.diameter_cells * dx
    yc = _centre_row_fraction(spec.ny) * spec.Ly
    c0 = np.array([spec.start_cells * dx, yc])
    ux, uy = spec.velocity
    u_hat = np.array([ux, uy]) / math.hypot(ux, uy)
    distance = spec.distance_diameters * D
    c1 = c0 + distance * u_hat
    alpha0 = circle_fractions(mesh, c0, 0.5 * D, spec.subsamples)
    bcs = {"left": FixedValue(0.0), "right": ZeroGradient(),
           "bottom": ZeroGradient(), "top": ZeroGradient()}
    alpha, log, status, dt = advect(mesh, alpha0, bcs, spec.velocity, distance, spec)
    exact = circle_fractions(mesh, c1, 0.5 * D, spec.subsamples)
    vol = mesh.geometry.cell_volumes
    summ = _advection_summary(spec, log, status, dt, float(vol @ alpha0))
    y_frac = c1[1] / spec.Ly
    x_lo = max(0.0, (c1[0] - 1.5 * D) / spec.Lx)
    x_hi = min(1.0, (c1[0] + 1.5 * D) / spec.Lx)
    p0, p1 = _line(spec, (x_lo, y_frac, x_hi, y_frac))
    rows = sample_line(alpha, mesh, p0, p1, spec.n_samples)
    ex = sample_line(exact, mesh, p0, p1, spec.n_samples)
    finite = np.all(np.isfinite(alpha))
    summ.update({"l1_error": metrics.l1_shape_error(mesh, alpha, exact) if finite else np.inf,
                 "interface_cells": metrics.interface_cells(alpha),
                 "diameter": D, "distance": distance,
                 "runtime_s": time.perf_counter() - t0,
                 "mesh_quality": quality_report(mesh)})
    return RunArtifacts("circle_translation", summ,
                        {"L2": [r + (e[-1],) for r, e in zip(rows, ex)]}, log,
                        fields={"alpha": alpha, "alpha_exact": exact, "mesh": mesh})


# ---------------------------------------------------------------- diffusion

DIVERGENCE_FACTOR = 1e3


@functools.lru_cache(maxsize=64)
def oracle_solution(H, D_g, D_l, t_end, length=0.04, n_nodes=4001, dt=1e-5):
    return solve_reference(Oracle1DSpec(length=length, D_g=D_g, D_l=D_l, H=H,
                                        n_nodes=n_nodes, dt=dt, t_end=t_end,
                                        scheme="bdf2"))


def planar_setup(spec, ny=None):
    """Mesh and liquid fraction (1 below the mid-plane) with square lattice cells."""
    ny = spec.ny if ny is None else ny
    Lx = spec.nx * spec.Ly / ny
    mesh = build_mesh(spec.mesh, spec.nx, ny, Lx, spec.Ly, spec.beta, spec.seed)
    alpha = halfplane_fractions(mesh, (0.0, 1.0), 0.5 * spec.Ly)
    return mesh, alpha


def sngrad_config(spec, mode=None):
    return SnGradConfig(mode=spec.sngrad if mode is None else mode, splitting=spec.splitting,
                        coefficient=spec.coefficient, gradient=spec.diffusion_gradient)


def run_planar_diffusion(spec, mode=None, ny=None, dt=None, mesh_alpha=None):
    """Stagnant gas over a liquid film; species starts in the gas."""
    t0 = time.perf_counter()
    mesh, a = planar_setup(spec, ny) if mesh_alpha is None else mesh_alpha
    dt = spec.dt if dt is None else dt
    phys = CstPhysics(spec.D_g, spec.D_l, spec.H)
    alpha = ScalarField(mesh, a)
    c = ScalarField(mesh, 1.0 - a)
    cfg = sngrad_config(spec, mode)
    stepper = SpeciesStepper(c, phys, cfg, dt, spec.time_scheme, spec.n_corr,
                             k_phase=spec.k_phase, weighting=spec.weighting)
    vol = mesh.geometry.cell_volumes
    mass0 = float(vol @ c.values)
    times = sorted(set(list(spec.eval_times) + [spec.t_end]))
    n_end = int(round(spec.t_end / dt))
    marks = {int(round(t / dt)): t for t in times if t <= spec.t_end + 1e-12}
    log, evals = [], {}
    lo, hi = c.values.min(), c.values.max()
    # c = alpha c_l + (1 - alpha) c_g with c_g <= c0 and c_l <= c0 / H
    c_max = max(hi, hi / spec.H)
    worst_mass = 0.0
    status = "ok"
    for k in range(1, n_end + 1):
        try:
            cc, rep = stepper.step(alpha)
        except SolverError as exc:
            status = f"solver failure at step {k}: {exc}"
            break
        if not np.all(np.isfinite(cc.values)):
            status = f"non-finite values at step {k}"
            break
        lo, hi = min(lo, rep.min), max(hi, rep.max)
        if max(-lo, hi) > DIVERGENCE_FACTOR * c_max:
            status = f"diverged at step {k}: |c| reached {max(-lo, hi):.3e}"
            break
        worst_mass = max(worst_mass, abs(rep.mass_change) / mass0)
        log.append({"step": k, "time": k * dt, "min": rep.min, "max": rep.max,
                    "mass": rep.mass})
        if k in marks:
            t = marks[k]
            ref = oracle_solution(spec.H, spec.D_g, spec.D_l, t, spec.Ly,
                                  spec.oracle_nodes, spec.oracle_dt)
            g = metrics.gas_average(mesh, cc.values, a, spec.H)
            evals[t] = {"time": t, "gas_average": g, "gas_average_oracle": ref.gas_average,
                        "gas_average_error": abs(g - ref.gas_average)}
    cfinal = stepper.c.values
    viol = [] if status == "ok" else [status]
    overshoot = metrics.bound_violation(lo, hi, (0.0, c_max))
    if overshoot > 1e-6 * c_max:
        viol.append(f"c left [0, {c_max:g}] by {overshoot:.3e}")
    summ = {"H": spec.H, "mode": cfg.mode, "mesh": spec.mesh, "n_cells": mesh.n_cells,
            "dx": mean_cell_width(mesh), "dt": dt, "steps": len(log), "status": status,
            "min_c": float(lo), "max_c": float(hi), "max_mass_change": worst_mass,
            "evaluations": [evals[t] for t in sorted(evals)],
            "c_bounds": (0.0, c_max), "overshoot": overshoot,
            "final_min_c": float(cfinal.min()), "final_max_c": float(cfinal.max()),
            "violations": viol}
    profiles = {}
    if status == "ok":
        ref = oracle_solution(spec.H, spec.D_g, spec.D_l, spec.t_end, spec.Ly,
                              spec.oracle_nodes, spec.oracle_dt)
        # the lattice width follows the level, so scale the line by the actual mesh
        width = float(np.ptp(mesh.points[:, 0]))
        p0, p1 = _line(spec.replace(Lx=width), (0.5, 0.0, 0.5, 1.0))
        cells = line_cells(mesh, p0, p1)
        exact = metrics.oracle_cell_averages(mesh, cells, ref.profile)
        summ["profile_l1"] = metrics.profile_l1(cfinal[cells], exact)
        yc = mesh.geometry.cell_centres[cells]
        profiles["L3"] = [(float(y[0]), float(y[1]), int(cl), float(v), float(e))
                          for y, cl, v, e in zip(yc, cells, cfinal[cells], exact)]
    summ["runtime_s"] = time.perf_counter() - t0
    return RunArtifacts("planar_diffusion", summ, profiles, log,
                        fields={"c": cfinal, "alpha": a, "mesh": mesh})


def run_convergence_study(spec):
    """Gas-average error over refined meshes; dt halves with every level."""
    t0 = time.perf_counter()
    rows, orders = [], []
    setups = {ny: planar_setup(spec, ny) for ny in spec.levels}
    for H in spec.h_values:
        for mode in spec.modes:
            sub = spec.replace(H=float(H))
            per_t = {t: [] for t in spec.eval_times}
            dxs = []
            for k, ny in enumerate(spec.levels):
                art = run_planar_diffusion(sub, mode=mode, ny=ny, dt=spec.dt / 2 ** k,
                                           mesh_alpha=setups[ny])
                dxs.append(art.summary["dx"])
                got = {ev["time"]: ev["gas_average_error"] for ev in art.summary["evaluations"]}
                for t in per_t:
                    err = got.get(t, float("nan"))
                    per_t[t].append(err)
                    rows.append({"H": H, "mode": mode, "ny": ny, "dx": art.summary["dx"],
                                 "dt": art.summary["dt"], "time": t, "error": err,
                                 "status": art.summary["status"]})
            for t, errs in per_t.items():
                orders.append({"H": H, "mode": mode, "time": t,
                               "order": metrics.fit_order(dxs, errs),
                               "monotone": metrics.is_monotone(errs), "errors": errs,
                               "dx": dxs})
    summ = {"orders": orders, "levels": list(spec.levels),
            "runtime_s": time.perf_counter() - t0, "violations": []}
    return RunArtifacts("convergence_study", summ, {}, [], table=rows)
