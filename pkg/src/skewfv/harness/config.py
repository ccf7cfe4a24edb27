"""Case definitions and the plain ``key = value`` case-file format.

Lines are ``key = value``; ``#`` starts a comment. Tuples are comma
separated. Unknown keys are an error. Example::

    kind = plug_flow
    mesh = chevron
    nx = 64
    ny = 32
    scheme = LB
    correction = SISC
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

KINDS = ("plug_flow", "circle_translation", "planar_diffusion", "convergence_study")
FAMILIES = ("uniform", "chevron", "random_quad", "triangular")


@dataclass
class CaseSpec:
    kind: str = "plug_flow"
    # mesh
    mesh: str = "chevron"
    nx: int = 64
    ny: int = 32
    Lx: float = 2.0
    Ly: float = 1.0
    beta: float = 0.25
    seed: int = 1
    # advection schemes
    scheme: str = "LB"
    correction: str = "SISC"
    gradient: str = "LSF"
    k_gamma: float = 1.0
    courant: float = 0.1
    velocity: tuple = (1.0, 0.0)
    solver: str = "bicgstab"
    tol: float = 1e-12
    # plug flow: slab extent and travel, as fractions of Lx
    slab: tuple = (0.1, 0.3)
    travel: float = 0.5
    # circle translation, in cell widths / diameters
    diameter_cells: float = 15.0
    start_cells: float = 12.0
    distance_diameters: float = 12.0
    subsamples: int = 16
    # planar diffusion
    H: float = 1.0
    D_g: float = 1e-1
    D_l: float = 1e-5
    sngrad: str = "NO"
    coefficient: str = "CDS-UC"
    splitting: str = "over-relaxed"
    diffusion_gradient: str = "LSF"
    time_scheme: str = "bdf2"
    k_phase: str = "gas"
    weighting: str = "henry"
    n_corr: int = 2
    dt: float = 1e-3
    t_end: float = 0.5
    oracle_nodes: int = 4001
    oracle_dt: float = 1e-5
    # convergence study
    levels: tuple = (50, 100, 200, 400)
    h_values: tuple = (0.033, 1.0, 30.0)
    modes: tuple = ("UC", "NO", "NO/NC")
    eval_times: tuple = (0.1,)
    # sample lines: (x0, y0, x1, y1) as fractions of (Lx, Ly); empty = case default
    line: tuple = ()
    n_samples: int = 200
    output: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.mesh not in FAMILIES:
            raise ValueError(f"mesh must be one of {FAMILIES}")
        if not 0.0 < self.courant <= 1.0:
            raise ValueError("courant must lie in (0, 1]")

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _coerce(raw, default):
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {raw!r}")
        return raw.lower() in ("true", "1", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        if raw == "":
            return ()
        items = [s.strip() for s in raw.split(",")]
        proto = default[0] if default else 0.0
        out = []
        for s in items:
            if isinstance(proto, str):
                out.append(s)
            else:
                v = float(s)
                out.append(int(v) if isinstance(proto, int) and v.is_integer() else v)
        return tuple(out)
    return raw


def parse_case_text(text, base=None):
    base = CaseSpec() if base is None else base
    defaults = base.to_dict()
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(raw, defaults[key])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return base.replace(**values)


def load_case(path, base=None):
    with open(path) as fh:
        return parse_case_text(fh.read(), base)


def dump_case(spec):
    lines = []
    for k, v in spec.to_dict().items():
        if isinstance(v, tuple):
            v = ", ".join(str(x) for x in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def defaults_for(kind):
    """Reference settings of each case kind."""
    if kind == "plug_flow":
        return CaseSpec(kind=kind, nx=64, ny=32, Lx=2.0, Ly=1.0)
    if kind == "circle_translation":
        # 12-diameter travel at 15 cells per diameter needs a long channel
        return CaseSpec(kind=kind, nx=204, ny=24, Lx=204.0 / 24.0, Ly=1.0)
    if kind == "planar_diffusion":
        # 308 rows give the cell width closest to 1.3e-4 m; the mid-plane is a lattice row
        return CaseSpec(kind=kind, nx=9, ny=308, Lx=9 * 0.04 / 308, Ly=0.04, dt=1e-3,
                        t_end=0.5, eval_times=(0.1, 0.5))
    if kind == "convergence_study":
        return CaseSpec(kind=kind, nx=5, ny=50, Lx=5 * 0.04 / 50, Ly=0.04, dt=2e-3,
                        t_end=0.5, levels=(50, 100, 200, 400), eval_times=(0.1, 0.5))
    raise ValueError(f"unknown kind {kind!r}")

