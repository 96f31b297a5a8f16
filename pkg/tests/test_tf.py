import numpy as np
import pytest

from tfmeanfield.errors import ConfigurationError, IterationError, PreconditionError
from tfmeanfield.fields import ExternalFields, normalized_density
from tfmeanfield.phasespace import Density, PhaseGrid, SpatialGrid, integrate
from tfmeanfield.tf import (
    TFProblem,
    ball_volume,
    build_m_rho,
    c_tf,
    subadditivity_check,
    tf_energy,
    tf_minimize,
)


def test_c_tf_values():
    assert c_tf(1) == pytest.approx(np.pi**2, rel=1e-12)
    assert c_tf(2) == pytest.approx(4 * np.pi, rel=1e-12)
    assert c_tf(3) == pytest.approx((6 * np.pi**2) ** (2 / 3), rel=1e-12)
    with pytest.raises(ConfigurationError):
        c_tf(4)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("rho", [0.1, 1.0, 7.5])
def test_free_fermi_filling(d, rho):
    radius = np.sqrt(c_tf(d) * rho ** (2 / d))
    assert ball_volume(d, radius) / (2 * np.pi) ** d == pytest.approx(rho, rel=1e-12)


def test_tf_energy_closed_form():
    g = SpatialGrid(1, 8.0, 1024)
    f = ExternalFields.from_catalog(g, V=("harmonic", {}))
    rho = np.sqrt(np.clip(2 - g.axis**2, 0, None)) / np.pi
    assert abs(tf_energy(rho, TFProblem(f)) - 1.0) < 2e-4
    assert tf_energy(np.zeros(g.shape), TFProblem(f)) == 0.0


def test_tf_energy_box():
    g = SpatialGrid(1, 2.0, 256)
    f = ExternalFields.from_catalog(g)
    assert tf_energy(np.full(g.shape, 0.5), TFProblem(f)) == pytest.approx(np.pi**2 / 12, rel=1e-12)


def test_tf_energy_rejects_nan(harmonic_fields):
    with pytest.raises(ConfigurationError):
        tf_energy(np.full(harmonic_fields.grid.shape, np.nan), TFProblem(harmonic_fields))


def test_harmonic_minimizer(harmonic_fields):
    sol = tf_minimize(TFProblem(harmonic_fields))
    g = harmonic_fields.grid
    assert abs(sol.mu - 2) < 1e-3 and abs(sol.energy - 1) < 1e-3
    ref = np.sqrt(np.clip(2 - g.axis**2, 0, None)) / np.pi
    assert np.abs(sol.rho.values - ref).max() < 1e-3
    assert abs(sol.rho.mass - 1) <= 1e-8 and sol.residual <= 1e-7


def test_harmonic_lambda_two(harmonic_fields):
    sol = tf_minimize(TFProblem(harmonic_fields, 2.0))
    assert abs(sol.mu - 4) < 1e-3 and abs(sol.energy - 4) < 1e-3


def test_box_minimizer(box_fields):
    sol = tf_minimize(TFProblem(box_fields))
    g = box_fields.grid
    inside = np.abs(g.axis) < 1
    assert np.allclose(sol.rho.values[inside], 0.5, atol=1e-12)
    assert np.all(sol.rho.values[~inside] == 0)
    assert abs(sol.energy - np.pi**2 / 12) < 1e-3


def interacting():
    g = SpatialGrid(1, 8.0, 1024)
    return ExternalFields.from_catalog(g, V=("harmonic", {}), w=("gaussian_bump", {"amp": 0.5, "sigma": 1.0}))


def test_interacting_minimizer_beats_competitors(rng):
    f = interacting()
    sol = tf_minimize(TFProblem(f))
    g = f.grid
    # Euler-Lagrange residual recomputed independently
    target = (np.clip(sol.mu - f.V - f.convolve(sol.rho.values), 0, None) / np.pi**2) ** 0.5
    assert np.abs(target - sol.rho.values).max() <= 1e-6
    for _ in range(50):
        c = rng.uniform(-1, 1)
        s = rng.uniform(0.3, 2.0)
        comp = np.exp(-((g.axis - c) ** 2) / (2 * s**2)) * (1 + 0.3 * rng.uniform() * np.cos(g.axis))
        comp *= 1 / integrate(comp, g)
        assert sol.energy <= tf_energy(comp, TFProblem(f)) + 1e-12


def test_mixing_one_converges_to_same_point():
    f = interacting()
    a = tf_minimize(TFProblem(f), mixing=0.5)
    b = tf_minimize(TFProblem(f), mixing=1.0)
    assert abs(a.energy - b.energy) < 1e-9


def test_non_convex_w_rejected():
    g = SpatialGrid(1, 8.0, 256)
    f = ExternalFields.from_catalog(g, V=("harmonic", {}), w=("gaussian_bump", {"amp": -0.5, "sigma": 1.0}))
    assert not f.convex_interaction
    with pytest.raises(PreconditionError):
        tf_minimize(TFProblem(f))
    # evaluation still works
    assert np.isfinite(tf_energy(np.full(g.shape, 1 / 8), TFProblem(f)))


def test_iteration_failure_carries_residual():
    with pytest.raises(IterationError) as info:
        tf_minimize(TFProblem(interacting()), max_iter=2)
    assert info.value.residual > 0 and len(info.value.history) == 2


def test_m_rho_disc(harmonic_fields):
    sol = tf_minimize(TFProblem(harmonic_fields))
    g = harmonic_fields.grid
    ph = PhaseGrid(g, 3.0, 1024)
    m = build_m_rho(sol.rho, harmonic_fields.A, ph)
    x, p = ph.coords()
    disc = (x**2 + p**2 <= 2).astype(float)
    assert np.abs(m.values - disc).sum() * ph.weight < 0.05
    assert abs(m.mass - 1) < 1e-2


def test_m_rho_zero_density_and_coverage():
    g = SpatialGrid(1, 4.0, 64)
    ph = PhaseGrid(g, 2.0, 64)
    assert not np.any(build_m_rho(Density(g, np.zeros(64)), np.zeros((1, 64)), ph).values)
    with pytest.raises(ConfigurationError):
        build_m_rho(Density(g, np.full(64, 0.25)), np.zeros((1, 64)), PhaseGrid(g, 0.5, 64))


def test_m_rho_constant_A_translates():
    g = SpatialGrid(1, 4.0, 64)
    ph = PhaseGrid(g, 4.0, 128)
    rho = Density(g, normalized_density("cos2_bump", g, half_width=1.5))
    shift = 5  # grid steps
    a = shift * ph.h_p
    m0 = build_m_rho(rho, np.zeros((1, 64)), ph).values
    ma = build_m_rho(rho, np.full((1, 64), a), ph).values
    assert np.array_equal(ma[:, : 128 - shift], m0[:, shift:])


def test_subadditivity_harmonic_binding(harmonic_fields):
    rows = subadditivity_check(TFProblem(harmonic_fields), [0.0, 0.5, 1.0])
    r0, r5, r1 = rows
    assert r0["holds"] and r1["holds"] and r0["e_split"] == pytest.approx(r0["e1"])
    assert not r5["holds"]
    assert r5["e_split"] == pytest.approx(0.5, abs=1e-3)
