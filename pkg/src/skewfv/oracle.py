"""1D finite-difference reference for planar two-phase diffusion with a Henry jump.

Liquid occupies ``y < y_i``, gas ``y > y_i``. The interface is a double node
carrying ``c_g = H c_l``; the flux balance over the two interface half-cells
closes the system. Outer ends are zero-flux half-cells.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.special import erf


@dataclass(frozen=True)
class Oracle1DSpec:
    length: float = 0.04
    interface: float | None = None
    D_g: float = 1e-1
    D_l: float = 1e-5
    H: float = 1.0
    n_nodes: int = 2001
    dt: float = 1e-4
    t_end: float = 0.5
    c_gas0: float = 1.0
    c_liquid0: float = 0.0
    scheme: str = "euler"

    def __post_init__(self):
        if self.H <= 0.0:
            raise ValueError("Henry coefficient must be positive")
        if self.D_g <= 0.0 or self.D_l <= 0.0:
            raise ValueError("diffusivities must be positive")
        if self.n_nodes < 1000:
            raise ValueError("at least 1000 nodes are required")
        if self.scheme not in ("euler", "bdf2"):
            raise ValueError("scheme must be euler or bdf2")
        yi = self.y_interface
        if not 0.0 < yi < self.length:
            raise ValueError("interface must lie inside the domain")

    @property
    def y_interface(self):
        return 0.5 * self.length if self.interface is None else self.interface

    def grid(self):
        """Node spacing and the liquid/gas node counts with the interface on a node."""
        h = self.length / (self.n_nodes - 1)
        n_l = int(round(self.y_interface / h))
        if abs(n_l * h - self.y_interface) > 1e-9 * self.length:
            raise ValueError("interface does not coincide with a node")
        return h, n_l, self.n_nodes - 1 - n_l


@dataclass
class OracleSolution:
    spec: Oracle1DSpec
    y_liquid: np.ndarray
    c_liquid: np.ndarray
    y_gas: np.ndarray
    c_gas: np.ndarray
    times: np.ndarray
    mass: np.ndarray
    gas_average_history: np.ndarray

    @property
    def gas_average(self):
        return float(self.gas_average_history[-1])

    def profile(self, y):
        """Concentration at y; the gas branch is taken at the interface itself."""
        y = np.asarray(y, dtype=float)
        yi = self.spec.y_interface
        cl = np.interp(y, self.y_liquid, self.c_liquid)
        cg = np.interp(y, self.y_gas, self.c_gas)
        return np.where(y < yi, cl, cg)

    def rows(self):
        y = np.concatenate([self.y_liquid, self.y_gas])
        c = np.concatenate([self.c_liquid, self.c_gas])
        return list(zip(y.tolist(), c.tolist()))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y", "c"])
            for y, c in self.rows():
                w.writerow([f"{y:.12g}", f"{c:.12g}"])


def _operator(spec):
    """Mass matrix diagonal and the stiffness matrix over the reduced unknowns.

    Unknowns: liquid nodes 0..n_l (last is the interface liquid value) and
    gas nodes 1..n_g (the gas interface value is H times the liquid one).
    """
    h, n_l, n_g = spec.grid()
    H = spec.H
    n = n_l + 1 + n_g
    mass = np.full(n, h)
    mass[0] = 0.5 * h
    mass[n_l] = 0.5 * h * (1.0 + H)
    mass[-1] = 0.5 * h
    links = []

    def link(i, j, ci, cj, D):
        # flux D (cj u_j - ci u_i)/h into i, out of j
        links.append((i, j, ci, cj, D / h))

    for i in range(n_l):
        link(i, i + 1, 1.0, 1.0, spec.D_l)
    # gas: index n_l is the interface with gas value H * c_l
    link(n_l, n_l + 1, H, 1.0, spec.D_g)
    for i in range(n_l + 1, n - 1):
        link(i, i + 1, 1.0, 1.0, spec.D_g)
    li, lj, ci, cj, k = (np.array(v) for v in zip(*links))
    li, lj = li.astype(np.int64), lj.astype(np.int64)
    rows = np.concatenate([li, li, lj, lj])
    cols = np.concatenate([li, lj, li, lj])
    vals = np.concatenate([k * ci, -k * cj, -k * ci, k * cj])
    K = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return mass, K, h, n_l, n_g, (li, lj, ci, cj, k)


def _conservative_update(u, x, mass, dt, links):
    """u + dt/mass * div(link fluxes of x); equals x up to solve error, conserves exactly."""
    li, lj, ci, cj, k = links
    f = k * (cj * x[lj] - ci * x[li])
    div = np.bincount(li, weights=f, minlength=u.size) - np.bincount(lj, weights=f, minlength=u.size)
    return u + dt * div / mass


def solve_reference(spec, record_every=1):
    """March the 1D problem to ``spec.t_end``; returns an :class:`OracleSolution`."""
    mass, K, h, n_l, n_g, links = _operator(spec)
    H = spec.H
    n = mass.size
    u = np.empty(n)
    u[:n_l] = spec.c_liquid0
    u[n_l + 1:] = spec.c_gas0
    # interface pair carries the mass of both half-cells
    u[n_l] = (spec.c_liquid0 + spec.c_gas0) / (1.0 + H)

    n_steps = max(1, int(round(spec.t_end / spec.dt)))
    dt = spec.t_end / n_steps
    M = sp.diags(mass)
    lu_be = splu((M / dt + K).tocsc())
    lu_bdf = splu((1.5 * M / dt + K).tocsc()) if spec.scheme == "bdf2" else None

    times, masses, gas_avg = [0.0], [float(mass @ u)], [_gas_average(u, h, n_l, H)]
    prev = None
    for k in range(1, n_steps + 1):
        if lu_bdf is not None and prev is not None:
            x = lu_bdf.solve(mass / dt * (2.0 * u - 0.5 * prev))
            new = (4.0 * u - prev) / 3.0 + (2.0 / 3.0) * (
                _conservative_update(u, x, mass, dt, links) - u)
        else:
            new = _conservative_update(u, lu_be.solve(mass / dt * u), mass, dt, links)
        prev, u = u, new
        if k % record_every == 0 or k == n_steps:
            times.append(k * dt)
            masses.append(float(mass @ u))
            gas_avg.append(_gas_average(u, h, n_l, H))

    y_l = np.arange(n_l + 1) * h
    y_g = spec.y_interface + np.arange(n_g + 1) * h
    c_l = u[:n_l + 1].copy()
    c_g = np.concatenate([[H * u[n_l]], u[n_l + 1:]])
    return OracleSolution(spec, y_l, c_l, y_g, c_g, np.array(times), np.array(masses),
                          np.array(gas_avg))


def _gas_average(u, h, n_l, H):
    c_g = np.concatenate([[H * u[n_l]], u[n_l + 1:]])
    return float(np.trapezoid(c_g, dx=h) / (h * (c_g.size - 1)))


def equilibrium_state(spec):
    """Closed-form long-time state (c_liquid, c_gas) from mass balance and the jump."""
    yi = spec.y_interface
    Lg = spec.length - yi
    total = spec.c_gas0 * Lg + spec.c_liquid0 * yi
    c_l = total / (yi + spec.H * Lg)
    return c_l, spec.H * c_l


def erfc_profile(y, y_i, D, t, c_low=0.0, c_high=1.0):
    """Single-material similarity solution for a step from c_low (below) to c_high."""
    return c_low + (c_high - c_low) * 0.5 * (1.0 + erf((np.asarray(y) - y_i) / np.sqrt(4.0 * D * t)))
