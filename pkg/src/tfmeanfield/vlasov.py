"""Vlasov energy of phase-space measures and the bathtub comparison."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .fields import ExternalFields
from .phasespace import Density, PhaseGrid, PhaseSpaceMeasure, integrate
from .tf import build_m_rho

MARGINAL_TOL = 1e-2


def _split(m: PhaseSpaceMeasure):
    g = m.grid
    return g, m.values.reshape(g.xgrid.shape + (g.n_p,) * g.d)


def rho_of_m(m: PhaseSpaceMeasure) -> Density:
    """Spatial density ``(2 pi)^-d int m dp``."""
    g, vals = _split(m)
    if not np.all(np.isfinite(vals)):
        raise ConfigurationError("phase-space measure has non-finite values")
    p_axes = tuple(range(g.d, 2 * g.d))
    rho = vals.sum(axis=p_axes) * g.h_p**g.d / (2 * np.pi) ** g.d
    return Density(g.xgrid, np.clip(rho, 0.0, None))


def vlasov_energy(m: PhaseSpaceMeasure, fields: ExternalFields) -> float:
    """``(2 pi)^-d iint |p + A(x)|^2 m + int V rho_m + D_w(rho_m, rho_m)/2``."""
    g, vals = _split(m)
    if g.xgrid != fields.grid:
        raise ConfigurationError("measure and fields live on different spatial grids")
    if not np.all(np.isfinite(vals)):
        raise ConfigurationError("phase-space measure has non-finite values")
    d = g.d
    coords = g.coords()
    shift2 = sum((coords[d + i] + fields.A[i][(Ellipsis,) + (None,) * d]) ** 2 for i in range(d))
    kinetic = integrate(shift2 * vals, g) / (2 * np.pi) ** d
    rho = rho_of_m(m).values
    return float(kinetic + fields.potential_energy(rho) + 0.5 * fields.direct_energy(rho))


def _row_correct(values, target_rho, g: PhaseGrid):
    """Rescale each x-row so the spatial marginal equals ``target_rho``; clip to ``[0, 1]``."""
    d = g.d
    p_axes = tuple(range(d, 2 * d))
    rho = values.sum(axis=p_axes) * g.h_p**d / (2 * np.pi) ** d
    ratio = np.divide(target_rho, rho, out=np.zeros_like(rho), where=rho > 0)
    return np.clip(values * ratio[(Ellipsis,) + (None,) * d], 0.0, 1.0)


def dilated_competitor(m: PhaseSpaceMeasure, s: float) -> PhaseSpaceMeasure:
    """``m(x, p/s)/s^d`` (same marginal), for ``s >= 1`` so values stay in ``[0, 1]``."""
    if s < 1:
        raise PreconditionError("dilation factor must be >= 1 to keep values below 1")
    g, vals = _split(m)
    if g.d != 1:
        raise ConfigurationError("dilated competitors are implemented for d = 1")
    p = g.p_axis
    out = np.stack([np.interp(p / s, p, row, left=0.0, right=0.0) for row in vals]) / s
    out = _row_correct(out, rho_of_m(m).values, g)
    return PhaseSpaceMeasure(g, out, kind="vlasov")


def mollified_competitor(m: PhaseSpaceMeasure, sigma: float) -> PhaseSpaceMeasure:
    """Gaussian smoothing in ``p`` with width ``sigma``, marginal restored row by row."""
    g, vals = _split(m)
    d = g.d
    k = np.arange(g.n_p)
    k = np.where(k < g.n_p // 2, k, k - g.n_p) * g.h_p
    kern1 = np.exp(-0.5 * (k / sigma) ** 2)
    kern1 /= kern1.sum()
    kern = np.ones((g.n_p,) * d)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = g.n_p
        kern = kern * kern1.reshape(shape)
    p_axes = tuple(range(d, 2 * d))
    out = np.real(np.fft.ifftn(np.fft.fftn(vals, axes=p_axes) * np.fft.fftn(kern), axes=p_axes))
    out = _row_correct(np.clip(out, 0.0, 1.0), rho_of_m(m).values, g)
    return PhaseSpaceMeasure(g, out, kind="vlasov")


@dataclass
class BathtubReport:
    energy_m_rho: float
    energies: list
    margins: list
    tol: float

    @property
    def passed(self) -> bool:
        return all(mg >= -self.tol for mg in self.margins)


def bathtub_optimality_check(rho: Density, fields: ExternalFields, competitors, phase: PhaseGrid, tol: float = 1e-10) -> BathtubReport:
    """Compare ``vlasov_energy(m_rho)`` with each competitor of (nearly) the same marginal.

    The reference is the sampled indicator; competitors must reproduce its
    marginal within ``1e-2`` in L1.
    """
    m_rho = build_m_rho(rho, fields.A, phase)
    ref_rho = rho_of_m(m_rho).values
    e0 = vlasov_energy(m_rho, fields)
    energies, margins = [], []
    for comp in competitors:
        if comp.kind == "wigner":
            raise PreconditionError("competitors must take values in [0, 1]")
        gap = integrate(np.abs(rho_of_m(comp).values - ref_rho), phase.xgrid)
        if gap > MARGINAL_TOL:
            raise PreconditionError(f"competitor marginal differs from rho by {gap:.3e} in L1")
        e = vlasov_energy(comp, fields)
        energies.append(e)
        margins.append(e - e0)
    return BathtubReport(e0, energies, margins, tol)
