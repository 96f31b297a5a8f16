import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfmeanfield.errors import ConfigurationError
from tfmeanfield.phasespace import (
    Density,
    PhaseGrid,
    PhaseSpaceMeasure,
    Scaling,
    SpatialGrid,
    fourier_hbar,
    integrate,
)


@pytest.mark.parametrize("N,d", [(1, 1), (7, 1), (64, 2), (27, 3), (1000, 3)])
def test_scaling_hbar(N, d):
    s = Scaling(N, d)
    assert abs(s.hbar**d * N - 1) <= 1e-14


def test_scaling_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        Scaling(0, 1)
    with pytest.raises(ConfigurationError):
        Scaling(4, 4)


def test_grid_nodes_are_cell_centres():
    g = SpatialGrid(1, 2.0, 8)
    assert np.allclose(g.axis, -1 + (np.arange(8) + 0.5) * 0.25)
    assert g.h == 0.25 and g.weight == 0.25


def test_non_power_of_two_rejected():
    with pytest.raises(ConfigurationError):
        SpatialGrid(1, 2.0, 100)


@pytest.mark.parametrize("n", [2, 16, 1024])
def test_constant_integrates_exactly(n):
    g = SpatialGrid(1, 2.0, n)
    assert integrate(np.ones(g.shape), g) == pytest.approx(2.0, abs=1e-14)


def test_constant_in_2d_exact():
    g = SpatialGrid(2, 3.0, 32)
    assert integrate(np.ones(g.shape), g) == pytest.approx(9.0, abs=1e-12)


def test_x_squared_quadrature():
    g = SpatialGrid(1, 2.0, 1024)
    assert abs(integrate(g.axis**2, g) - 2 / 3) < 1e-5


def test_phase_grid_weight_and_extent():
    g = SpatialGrid(1, 8.0, 64)
    ph = PhaseGrid.for_hbar(g, 0.25)
    assert ph.pmax == pytest.approx(np.pi * 0.25 / g.h)
    assert ph.weight == pytest.approx(g.h * ph.h_p)
    assert ph.matches_fft()
    with pytest.raises(ConfigurationError):
        PhaseGrid(g, 0.5 * ph.pmax, 64, hbar=0.25)


def test_gaussian_self_dual():
    hbar = 0.1
    g = SpatialGrid(1, 8.0, 256)
    f = (np.pi * hbar) ** -0.25 * np.exp(-g.axis**2 / (2 * hbar))
    F = fourier_hbar(f, g, hbar)
    p = g.momentum_axis(hbar)
    ref = (np.pi * hbar) ** -0.25 * np.exp(-p**2 / (2 * hbar))
    assert np.abs(F - ref).max() < 1e-12


def test_fourier_matches_direct_sum():
    hbar = 0.3
    g = SpatialGrid(1, 5.0, 32)
    rng = np.random.default_rng(1)
    f = rng.normal(size=32) + 1j * rng.normal(size=32)
    p = g.momentum_axis(hbar)
    direct = (2 * np.pi * hbar) ** -0.5 * g.h * np.exp(-1j * np.outer(p, g.axis) / hbar) @ f
    assert np.allclose(fourier_hbar(f, g, hbar), direct, atol=1e-13)


def test_fourier_zero():
    g = SpatialGrid(2, 4.0, 16)
    assert not np.any(fourier_hbar(np.zeros(g.shape), g, 0.5))


@pytest.mark.parametrize("d,n", [(1, 64), (2, 16)])
def test_fourier_roundtrip_and_parseval(d, n):
    rng = np.random.default_rng(d)
    g = SpatialGrid(d, 6.0, n)
    hbar = 0.2
    h_p = g.momentum_step(hbar)
    for _ in range(100):
        f = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
        F = fourier_hbar(f, g, hbar)
        back = fourier_hbar(F, g, hbar, "inverse")
        assert np.linalg.norm(back - f) <= 1e-12 * np.linalg.norm(f)
        lhs = np.sum(np.abs(f) ** 2) * g.weight
        rhs = np.sum(np.abs(F) ** 2) * h_p**d
        assert abs(lhs - rhs) <= 1e-12 * lhs


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=9), st.floats(min_value=0.05, max_value=2.0))
def test_fourier_inverse_property(log_n, hbar):
    g = SpatialGrid(1, 3.0, 2**log_n)
    f = np.cos(np.arange(g.n)) + 1j * np.sin(0.3 * np.arange(g.n))
    back = fourier_hbar(fourier_hbar(f, g, hbar), g, hbar, "inverse")
    assert np.linalg.norm(back - f) <= 1e-12 * np.linalg.norm(f)


def test_density_validation():
    g = SpatialGrid(1, 2.0, 8)
    with pytest.raises(ConfigurationError):
        Density(g, -np.ones(8))
    with pytest.raises(ConfigurationError):
        Density(g, np.full(8, np.nan))
    rho = Density(g, np.full(8, 0.5))
    assert rho.mass == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rho.values[0] = 1.0


def test_measure_bounds_and_kinds():
    g = SpatialGrid(1, 2.0, 8)
    ph = PhaseGrid(g, 1.0, 8)
    with pytest.raises(ConfigurationError):
        PhaseSpaceMeasure(ph, np.full(ph.shape, 1.1), kind="husimi")
    with pytest.raises(ConfigurationError):
        PhaseSpaceMeasure(ph, np.full(ph.shape, -0.1), kind="vlasov")
    w = PhaseSpaceMeasure(ph, np.full(ph.shape, -0.1), kind="wigner")
    assert w.values.min() < 0
    m = PhaseSpaceMeasure(ph, np.ones(ph.shape))
    assert m.mass == pytest.approx(2 * 2 / (2 * np.pi))
