import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewfv.advection import AdvectionSchemeConfig, face_flux, face_weights
from skewfv.diffusion import SnGradConfig, diffusion_operator
from skewfv.fields import ScalarField
from skewfv.linsys import MatrixAddressing
from skewfv.mesh import build_cartesian
from skewfv.harness.cases import halfplane_fractions
from skewfv.transport import (CstPhysics, SpeciesStepper, cst_K, equilibrium_check,
                              gas_concentration, harmonic_diffusivity, henry_fraction,
                              step_species)


def layered(mesh, y0):
    """Liquid fraction 1 below y0 on a mesh with a face at y0."""
    return ScalarField(mesh, (mesh.geometry.cell_centres[:, 1] < y0).astype(float))


@given(st.floats(1e-3, 1e3), st.floats(0.0, 1.0))
def test_gas_concentration_limits(H, c):
    assert np.isclose(gas_concentration(c, 0.0, H), c)
    assert np.isclose(gas_concentration(c, 1.0, H), H * c)
    assert np.isclose(cst_K(0.3, 1.0), 0.0)


def test_cst_K_is_log_derivative():
    # K = d/d(alpha) of ln(1 + alpha (H - 1))
    H, a, h = 7.0, 0.4, 1e-6
    f = lambda x: np.log(1.0 + x * (H - 1.0))
    assert np.isclose((f(a + h) - f(a - h)) / (2 * h), cst_K(a, H), rtol=1e-8)


@given(st.floats(1e-3, 1e3), st.floats(0.0, 1.0))
def test_henry_fraction_limits(H, a):
    f = henry_fraction(a, H)
    assert 0.0 <= f <= 1.0
    assert np.isclose(henry_fraction(0.0, H), 0.0) and np.isclose(henry_fraction(1.0, H), 1.0)
    assert np.isclose(henry_fraction(a, 1.0), a)
    D = harmonic_diffusivity(a, 2.0, 0.5)
    assert 0.5 - 1e-12 <= D <= 2.0 + 1e-12


@pytest.mark.parametrize("H", [0.033, 1.0, 30.0])
def test_henry_weighting_gives_series_resistance(H):
    # two cells split by a face-aligned interface: the initial exchange rate
    # must equal that of the two half cells in series
    mesh = build_cartesian(2, 2, 1.0, 1.0)
    alpha = layered(mesh, 0.5)
    D_g, D_l, dt = 0.1, 1e-3, 1e-7
    c0 = np.where(alpha.values > 0.5, 0.0, 1.0)
    rates = {}
    for w in ("henry", "volume"):
        st_ = SpeciesStepper(ScalarField(mesh, c0), CstPhysics(D_g, D_l, H),
                             SnGradConfig("UC"), dt=dt, time_scheme="euler", weighting=w)
        c, _ = st_.step(alpha)
        rates[w] = c.values[alpha.values > 0.5][0] / dt
    dy = 0.5
    exact = (1.0 - 0.0) / (0.5 * dy * (1.0 / D_g + H / D_l)) / dy
    assert np.isclose(rates["henry"], exact, rtol=1e-5)
    if H != 1.0:
        assert not np.isclose(rates["volume"], exact, rtol=1e-2)


@pytest.mark.parametrize("mode", ["UC", "NO"])
def test_gas_K_keeps_cut_cell_mixture_at_rest(chevron, mode):
    # c = alpha c_l + (1 - alpha) H c_l is a steady state for any fractions
    H = 5.0
    a = halfplane_fractions(chevron, (0.0, 1.0), 0.47)
    assert np.any((a > 1e-3) & (a < 1.0 - 1e-3))
    alpha = ScalarField(chevron, a)
    c0 = 0.2 * (a + (1.0 - a) * H)
    drift = {}
    for kp in ("gas", "liquid"):
        st_ = SpeciesStepper(ScalarField(chevron, c0), CstPhysics(1e-2, 1e-3, H),
                             SnGradConfig(mode), dt=0.1, k_phase=kp)
        for _ in range(3):
            c, _ = st_.step(alpha)
        drift[kp] = np.max(np.abs(c.values - c0))
    assert drift["gas"] < 1e-10
    assert drift["liquid"] > 1e-6


def test_physics_validation():
    with pytest.raises(ValueError):
        CstPhysics(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        CstPhysics(1.0, 1.0, -1.0)
    c = ScalarField(build_cartesian(4, 4, 1.0, 1.0), np.zeros(16))
    with pytest.raises(ValueError):
        SpeciesStepper(c, CstPhysics(1.0, 1.0, 1.0), time_scheme="rk")
    with pytest.raises(ValueError):
        SpeciesStepper(c, CstPhysics(1.0, 1.0, 1.0), diffusivity="edge")
    with pytest.raises(ValueError):
        SpeciesStepper(c, CstPhysics(1.0, 1.0, 1.0), k_phase="solid")
    with pytest.raises(ValueError):
        SpeciesStepper(c, CstPhysics(1.0, 1.0, 1.0), weighting="mass")


@pytest.mark.parametrize("H", [0.033, 1.0, 30.0])
@pytest.mark.parametrize("mode", ["UC", "NO", "NO/NC"])
def test_equilibrium_preserved_on_uniform(H, mode):
    mesh = build_cartesian(6, 10, 0.6, 1.0)
    alpha = layered(mesh, 0.5)
    c0 = np.where(alpha.values > 0.5, 0.2, 0.2 * H)
    st_ = SpeciesStepper(ScalarField(mesh, c0), CstPhysics(1e-2, 1e-3, H),
                         SnGradConfig(mode), dt=0.1)
    for _ in range(5):
        c, _ = st_.step(alpha)
    assert np.allclose(c.values, c0, rtol=1e-10)
    eq = equilibrium_check(c.values, alpha.values, H)
    assert eq["relative_deviation"] < 1e-10


@pytest.mark.parametrize("mode", ["UC", "NO", "NO/NC"])
@pytest.mark.parametrize("scheme", ["euler", "bdf2"])
def test_mass_conserved_with_cut_cells(chevron, mode, scheme):
    x = chevron.geometry.cell_centres
    alpha = ScalarField(chevron, np.clip((0.55 - x[:, 1]) * 8.0 + 0.5, 0.0, 1.0))
    rng = np.random.default_rng(5)
    c = ScalarField(chevron, rng.random(chevron.n_cells))
    st_ = SpeciesStepper(c, CstPhysics(1e-2, 1e-3, 5.0), SnGradConfig(mode), dt=1.0,
                         time_scheme=scheme)
    vol = chevron.geometry.cell_volumes
    m0 = vol @ c.values
    for _ in range(4):
        cc, rep = st_.step(alpha)
        assert abs(rep.mass_change) < 1e-11 * m0
    assert np.isclose(vol @ cc.values, m0, rtol=1e-11)


def test_jump_free_case_is_plain_diffusion(chevron):
    rng = np.random.default_rng(6)
    c0 = ScalarField(chevron, rng.random(chevron.n_cells))
    alpha = ScalarField(chevron, rng.random(chevron.n_cells))
    dt, D = 0.05, 0.3
    st_ = SpeciesStepper(c0, CstPhysics(D, D, 1.0), SnGradConfig("UC"), dt=dt)
    c, _ = st_.step(alpha)
    diag, up, low, src, _ = diffusion_operator(c0, D, SnGradConfig("UC"))
    vol = chevron.geometry.cell_volumes
    A = MatrixAddressing.of(chevron).assemble(vol / dt + diag, up, low).toarray()
    assert np.allclose(c.values, np.linalg.solve(A, vol / dt * c0.values + src), atol=1e-12)


def test_cell_diffusivity_variant_runs(chevron):
    alpha = layered(chevron, 0.5)
    c0 = ScalarField(chevron, np.where(alpha.values > 0.5, 0.0, 1.0))
    st_ = SpeciesStepper(c0, CstPhysics(1e-2, 1e-3, 2.0), dt=0.1, diffusivity="cell")
    D_f, kp, kn = st_.face_coefficients(alpha)
    assert D_f.shape == (chevron.n_faces,) and kp.shape == kn.shape == (chevron.n_internal,)
    c, rep = st_.step(alpha)
    assert np.all(np.isfinite(c.values))


def test_bdf2_rejects_moving_interface(chevron):
    alpha = layered(chevron, 0.5)
    c0 = ScalarField(chevron, np.ones(chevron.n_cells))
    F = face_flux(np.array([1.0, 0.0]), chevron)
    adv = face_weights(alpha, F, 0.01, AdvectionSchemeConfig())
    st_ = SpeciesStepper(c0, CstPhysics(1e-2, 1e-3, 2.0), dt=0.01, time_scheme="bdf2")
    st_.step(alpha, adv)
    with pytest.raises(ValueError):
        st_.step(alpha, adv)


def test_moving_step_conserves_with_closed_walls(chevron):
    alpha = layered(chevron, 0.5)
    c0 = ScalarField(chevron, np.ones(chevron.n_cells))
    F = face_flux(np.array([0.3, 0.0]), chevron)
    F[chevron.n_internal:] = 0.0
    adv = face_weights(alpha, F, 0.01, AdvectionSchemeConfig())
    c, rep = step_species(c0, alpha, CstPhysics(1e-2, 1e-3, 2.0), 0.01, adv_state=adv)
    assert abs(rep.mass_change) < 1e-12
