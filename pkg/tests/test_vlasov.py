import numpy as np
import pytest

from tfmeanfield.errors import ConfigurationError, PreconditionError
from tfmeanfield.fields import ExternalFields
from tfmeanfield.phasespace import PhaseGrid, PhaseSpaceMeasure, SpatialGrid
from tfmeanfield.tf import TFProblem, build_m_rho, tf_energy, tf_minimize
from tfmeanfield.vlasov import (
    bathtub_optimality_check,
    dilated_competitor,
    mollified_competitor,
    rho_of_m,
    vlasov_energy,
)


@pytest.fixture(scope="module")
def setup():
    g = SpatialGrid(1, 6.0, 1024)
    f = ExternalFields.from_catalog(g, V=("harmonic", {}))
    sol = tf_minimize(TFProblem(f))
    ph = PhaseGrid(g, 3.0, 2048)
    return f, sol, ph


def test_m_rho_energy_equals_tf(setup):
    f, sol, ph = setup
    m = build_m_rho(sol.rho, f.A, ph)
    e = vlasov_energy(m, f)
    assert abs(e - tf_energy(sol.rho, TFProblem(f))) <= 1e-2
    assert abs(e - 1) <= 1e-2


def test_marginal_of_m_rho(setup):
    f, sol, ph = setup
    m = build_m_rho(sol.rho, f.A, ph)
    diff = np.abs(rho_of_m(m).values - sol.rho.values).sum() * f.grid.h
    assert diff <= 1e-3


def test_zero_measure():
    g = SpatialGrid(1, 4.0, 32)
    f = ExternalFields.from_catalog(g, V=("harmonic", {}))
    ph = PhaseGrid(g, 2.0, 32)
    assert vlasov_energy(PhaseSpaceMeasure(ph, np.zeros(ph.shape)), f) == 0.0


def test_free_uniform_measure_kinetic():
    # m = 1 on |p| <= 1 for every x in C_2: kinetic (2 pi)^-1 * 2 * 2/3
    g = SpatialGrid(1, 2.0, 64)
    f = ExternalFields.from_catalog(g)
    ph = PhaseGrid(g, 2.0, 4096)
    m = (np.abs(ph.p_axis) <= 1).astype(float)[None].repeat(64, 0)
    e = vlasov_energy(PhaseSpaceMeasure(ph, m), f)
    assert e == pytest.approx(4 / 3 / (2 * np.pi), rel=5e-3)


def test_bathtub_beats_competitors(setup):
    f, sol, ph = setup
    m = build_m_rho(sol.rho, f.A, ph)
    comps = [dilated_competitor(m, 1.1), dilated_competitor(m, 1.3), mollified_competitor(m, 4 * ph.h_p)]
    for c in comps:
        assert c.values.min() >= 0 and c.values.max() <= 1
    rep = bathtub_optimality_check(sol.rho, f, comps, ph)
    assert rep.passed and min(rep.margins) > 0


def test_competitor_errors(setup):
    f, sol, ph = setup
    m = build_m_rho(sol.rho, f.A, ph)
    with pytest.raises(PreconditionError):
        dilated_competitor(m, 0.5)
    W = PhaseSpaceMeasure(ph, m.values - 0.5, kind="wigner")
    with pytest.raises(PreconditionError):
        bathtub_optimality_check(sol.rho, f, [W], ph)
    half = PhaseSpaceMeasure(ph, 0.5 * m.values)
    with pytest.raises(PreconditionError):
        bathtub_optimality_check(sol.rho, f, [half], ph)


def test_grid_mismatch(setup):
    f, sol, ph = setup
    other = ExternalFields.from_catalog(SpatialGrid(1, 6.0, 512))
    with pytest.raises(ConfigurationError):
        vlasov_energy(build_m_rho(sol.rho, f.A, ph), other)
