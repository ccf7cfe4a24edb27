"""Error measures and convergence-order fits."""
import numpy as np

from ..polygons import cell_average, fan_samples
from ..transport import gas_concentration


def l1_shape_error(mesh, alpha, alpha_exact):
    """Volume-weighted L1 distance, normalised by the exact phase volume."""
    vol = mesh.geometry.cell_volumes
    return float(vol @ np.abs(alpha - alpha_exact) / (vol @ alpha_exact))


def interface_cells(alpha, lo=0.01, hi=0.99):
    return int(np.count_nonzero((alpha > lo) & (alpha < hi)))


def bound_violation(lo, hi, bounds=(0.0, 1.0)):
    """Largest excursion of the extrema outside the bounds (0 when inside)."""
    return float(max(bounds[0] - lo, hi - bounds[1], 0.0))


def gas_average(mesh, c, alpha, H):
    """Gas-phase volume average with mixed cells split by the equilibrium jump."""
    w = (1.0 - alpha) * mesh.geometry.cell_volumes
    return float(w @ gas_concentration(c, alpha, H) / w.sum())


def cell_indicator_fractions(mesh, indicator, n=16):
    """Area fraction of each cell where indicator(points) holds, by fan sub-sampling."""
    out = np.empty(mesh.n_cells)
    for c in range(mesh.n_cells):
        pts, w = fan_samples(mesh.cell_polygon(c), n)
        out[c] = w @ indicator(pts) / w.sum()
    return out


def oracle_cell_averages(mesh, cells, profile, n=16):
    """Cell averages of a 1D profile c(y) over the listed cells."""
    return np.array([cell_average(mesh.cell_polygon(c), lambda p: profile(p[:, 1]), n)
                     for c in cells])


def profile_l1(values, reference):
    return float(np.mean(np.abs(np.asarray(values) - np.asarray(reference))))


def fit_order(h, err):
    """Least-squares slope of log(err) against log(h)."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    if len(h) < 2 or not np.all(np.isfinite(err)) or np.any(err <= 0.0):
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def is_monotone(err):
    """True when the error decreases at every refinement."""
    err = np.asarray(err, dtype=float)
    return bool(np.all(np.diff(err) < 0.0))
