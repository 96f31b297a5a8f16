import numpy as np
import pytest

from tfmeanfield.fields import ExternalFields
from tfmeanfield.phasespace import SpatialGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def harmonic_fields():
    g = SpatialGrid(1, 12.0, 2048)
    return ExternalFields.from_catalog(g, V=("harmonic", {}))


@pytest.fixture(scope="session")
def box_fields():
    # Dirichlet cube C_2 as V = +inf outside (-1, 1) inside a larger grid box
    g = SpatialGrid(1, 4.0, 2048)
    return ExternalFields.from_catalog(g, V=("box", {"half_width": 1.0}))


ACCEPTANCE: dict = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE[criterion] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
