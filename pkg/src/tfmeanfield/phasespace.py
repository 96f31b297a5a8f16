"""Grids, quadrature and the hbar-scaled Fourier transform.

Spatial grids are cell centred on the cube (-R/2, R/2)^d, so a Dirichlet wall
sits half a cell outside the first and last node and constants integrate
exactly with the midpoint rule.  Momentum grids are uniform on [-P, P) with the
same periodic layout as an FFT frequency axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

MEASURE_TOL = 1e-8


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Scaling:
    """Particle number ``N`` in dimension ``d`` with ``hbar = N**(-1/d)``."""

    N: int
    d: int = 1
    hbar: float = field(init=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be a positive integer, got {self.N!r}")
        if self.d not in (1, 2, 3):
            raise ConfigurationError(f"unsupported dimension d={self.d}")
        object.__setattr__(self, "hbar", float(self.N) ** (-1.0 / self.d))


@dataclass(frozen=True)
class SpatialGrid:
    """Cell-centred grid with ``n`` points per axis on ``(-R/2, R/2)^d``."""

    d: int
    R: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigurationError(f"unsupported dimension d={self.d}")
        if not _is_power_of_two(int(self.n)):
            raise ConfigurationError(f"points per axis must be a power of two, got n={self.n}")
        if not self.R > 0:
            raise ConfigurationError(f"box length must be positive, got R={self.R}")

    @property
    def h(self) -> float:
        return self.R / self.n

    @property
    def half_width(self) -> float:
        return self.R / 2

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def weight(self) -> float:
        return self.h**self.d

    @property
    def axis(self) -> np.ndarray:
        return -self.R / 2 + (np.arange(self.n) + 0.5) * self.h

    def coords(self) -> list[np.ndarray]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        return np.meshgrid(*([self.axis] * self.d), indexing="ij")

    def radius2(self) -> np.ndarray:
        return sum(c**2 for c in self.coords())

    def momentum_step(self, hbar: float) -> float:
        return 2 * np.pi * hbar / self.R

    def momentum_axis(self, hbar: float) -> np.ndarray:
        """Momenta ``(m - n/2) * 2 pi hbar / R`` matched to :func:`fourier_hbar`."""
        return (np.arange(self.n) - self.n // 2) * self.momentum_step(hbar)

    def offsets(self) -> np.ndarray:
        """Signed node offsets ``k h`` for ``k`` in ``[-n, n)`` (doubled grid)."""
        return (np.arange(2 * self.n) - self.n) * self.h

    def refined(self, factor: int = 2) -> "SpatialGrid":
        return SpatialGrid(self.d, self.R, self.n * factor)


@dataclass(frozen=True)
class PhaseGrid:
    """Product of a spatial grid and a momentum grid on ``[-pmax, pmax)^d``."""

    xgrid: SpatialGrid
    pmax: float
    n_p: int
    hbar: float | None = None

    def __post_init__(self):
        if not self.pmax > 0 or self.n_p < 2:
            raise ConfigurationError("momentum grid needs pmax > 0 and at least two nodes")
        if self.hbar is not None and self.pmax < np.pi * self.hbar / self.xgrid.h * (1 - 1e-12):
            raise ConfigurationError(
                f"momentum extent {self.pmax:g} is below the resolvable limit "
                f"pi*hbar/h = {np.pi * self.hbar / self.xgrid.h:g}"
            )

    @classmethod
    def for_hbar(cls, xgrid: SpatialGrid, hbar: float) -> "PhaseGrid":
        """Momentum grid dual to ``xgrid`` under :func:`fourier_hbar`."""
        return cls(xgrid, np.pi * hbar / xgrid.h, xgrid.n, hbar)

    @property
    def d(self) -> int:
        return self.xgrid.d

    @property
    def h_p(self) -> float:
        return 2 * self.pmax / self.n_p

    @property
    def p_axis(self) -> np.ndarray:
        return -self.pmax + np.arange(self.n_p) * self.h_p

    @property
    def shape(self) -> tuple:
        return self.xgrid.shape + (self.n_p,) * self.d

    @property
    def weight(self) -> float:
        return (self.xgrid.h * self.h_p) ** self.d

    def coords(self) -> list[np.ndarray]:
        """``x_1..x_d, p_1..p_d`` arrays of shape ``self.shape``."""
        axes = [self.xgrid.axis] * self.d + [self.p_axis] * self.d
        return np.meshgrid(*axes, indexing="ij")

    def matches_fft(self) -> bool:
        """True when the momentum nodes coincide with those of :func:`fourier_hbar`."""
        if self.hbar is None or self.n_p != self.xgrid.n:
            return False
        return bool(np.allclose(self.p_axis, self.xgrid.momentum_axis(self.hbar), rtol=0, atol=1e-12 * self.pmax))


@dataclass(frozen=True)
class Density:
    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("density has non-finite values")
        if v.min(initial=0.0) < 0:
            raise ConfigurationError("density must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        return integrate(self.values, self.grid)


@dataclass(frozen=True)
class PhaseSpaceMeasure:
    """Values of a phase-space function on a :class:`PhaseGrid`.

    ``kind`` is one of ``"husimi"``, ``"vlasov"`` or ``"wigner"``; only the
    first two are checked against ``0 <= m <= 1``.
    """

    grid: PhaseGrid
    values: np.ndarray
    kind: str = "vlasov"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if self.kind not in ("husimi", "vlasov", "wigner"):
            raise ConfigurationError(f"unknown measure kind {self.kind!r}")
        if self.kind != "wigner" and v.size:
            if v.min() < -MEASURE_TOL or v.max() > 1 + MEASURE_TOL:
                raise ConfigurationError(
                    f"{self.kind} measure outside [0, 1]: range [{v.min():.3e}, {v.max():.3e}]"
                )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        """Normalised mass ``(2 pi)^-d * integral of m``."""
        return integrate(self.values, self.grid) / (2 * np.pi) ** self.grid.d


def integrate(values, grid) -> float:
    """Midpoint quadrature over a :class:`SpatialGrid` or :class:`PhaseGrid`."""
    values = np.asarray(values)
    return np.sum(values) * grid.weight


def _checkerboard(grid: SpatialGrid) -> np.ndarray:
    sign = 1.0 - 2.0 * (np.arange(grid.n) % 2)
    out = np.ones(grid.shape)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.n
        out = out * sign.reshape(shape)
    return out


def _origin_phase(grid: SpatialGrid, hbar: float) -> np.ndarray:
    # exp(-i p . y0 / hbar) with y0 the first node on every axis
    y0 = grid.axis[0]
    ph1 = np.exp(-1j * grid.momentum_axis(hbar) * y0 / hbar)
    out = np.ones(grid.shape, dtype=complex)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.n
        out = out * ph1.reshape(shape)
    return out


def fourier_hbar(values, grid: SpatialGrid, hbar: float, direction: str = "forward") -> np.ndarray:
    """hbar-scaled Fourier transform over the last ``d`` axes of ``values``.

    Forward: ``(2 pi hbar)^(-d/2) * sum_y f(y) exp(-i p.y/hbar) h^d`` evaluated on
    ``grid.momentum_axis(hbar)``; inverse is its exact discrete inverse.
    """
    if not isinstance(grid, SpatialGrid):
        raise ConfigurationError("fourier_hbar needs a SpatialGrid")
    values = np.asarray(values, dtype=complex)
    if values.shape[values.ndim - grid.d:] != grid.shape:
        raise ConfigurationError(f"field shape {values.shape} does not end with grid shape {grid.shape}")
    axes = tuple(range(values.ndim - grid.d, values.ndim))
    norm = (2 * np.pi * hbar) ** (-grid.d / 2)
    sign = _checkerboard(grid)
    phase = _origin_phase(grid, hbar)
    if direction == "forward":
        return norm * grid.weight * phase * np.fft.fftn(values * sign, axes=axes)
    if direction == "inverse":
        h_p = grid.momentum_step(hbar)
        return norm * (h_p * grid.n) ** grid.d * sign * np.fft.ifftn(values * np.conj(phase), axes=axes)
    raise ConfigurationError(f"direction must be 'forward' or 'inverse', got {direction!r}")
