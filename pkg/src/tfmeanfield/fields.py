"""Sampled external potentials, vector potentials and pair interactions.

Profiles come from a small fixed catalog (see :data:`CATALOG`) so that
configuration files never carry executable expressions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError
from .phasespace import SpatialGrid, integrate

CONVEXITY_TOL = 1e-8


def _harmonic(r2, coords, coef=1.0):
    return coef * r2


def _box(r2, coords, half_width=None, inside=0.0):
    out = np.full(r2.shape, float(inside))
    if half_width is not None:
        outside = np.zeros(r2.shape, dtype=bool)
        for c in coords:
            outside |= np.abs(c) >= half_width
        out[outside] = np.inf
    return out


def _gaussian_bump(r2, coords, amp=1.0, sigma=1.0):
    return amp * np.exp(-r2 / (2 * sigma**2))


def _sine_bump(r2, coords, amp=1.0, freq=1.0, sigma=1.0):
    return amp * np.sin(freq * coords[0]) * np.exp(-r2 / (2 * sigma**2))


def _cos2_bump(r2, coords, half_width=1.0, amp=1.0):
    out = np.full(r2.shape, float(amp))
    for c in coords:
        out = out * np.where(np.abs(c) < half_width, np.cos(np.pi * c / (2 * half_width)) ** 2, 0.0)
    return out


def _zero(r2, coords):
    return np.zeros(r2.shape)


def _constant(r2, coords, value=0.0):
    return np.full(r2.shape, float(value))


CATALOG = {
    "harmonic": _harmonic,
    "box": _box,
    "gaussian_bump": _gaussian_bump,
    "sine_bump": _sine_bump,
    "cos2_bump": _cos2_bump,
    "zero": _zero,
    "constant": _constant,
}


def profile(name: str, coords, **params) -> np.ndarray:
    """Evaluate catalog profile ``name`` at the points ``coords`` (list of arrays)."""
    try:
        fn = CATALOG[name]
    except KeyError:
        raise ConfigurationError(f"unknown profile {name!r}; choose from {sorted(CATALOG)}") from None
    r2 = sum(np.asarray(c, dtype=float) ** 2 for c in coords)
    try:
        return np.asarray(fn(r2, coords, **params), dtype=float)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for profile {name!r}: {exc}") from None


def sample(name: str, grid: SpatialGrid, **params) -> np.ndarray:
    return profile(name, grid.coords(), **params)


def normalized_density(name: str, grid: SpatialGrid, mass: float = 1.0, **params) -> np.ndarray:
    vals = sample(name, grid, **params)
    total = integrate(vals, grid)
    if not total > 0:
        raise ConfigurationError(f"profile {name!r} has no mass on the grid")
    return vals * (mass / total)


def _offset_coords(grid: SpatialGrid):
    off = grid.offsets()
    return np.meshgrid(*([off] * grid.d), indexing="ij")


@dataclass(frozen=True)
class ExternalFields:
    """External potential ``V``, vector potential ``A`` and pair potential ``w``.

    ``V`` may be ``+inf`` outside a subdomain (hard walls).  ``A`` has shape
    ``(d,) + grid.shape``.  ``w_doubled`` samples ``w`` at the signed offsets
    ``k h``, ``k`` in ``[-n, n)``, on every axis, which is what a linear
    convolution over the grid needs.
    """

    grid: SpatialGrid
    V: np.ndarray
    A: np.ndarray
    w_doubled: np.ndarray

    def __post_init__(self):
        g = self.grid
        V = np.asarray(self.V, dtype=float).reshape(g.shape)
        A = np.asarray(self.A, dtype=float).reshape((g.d,) + g.shape)
        w = np.asarray(self.w_doubled, dtype=float).reshape((2 * g.n,) * g.d)
        if np.isnan(V).any() or np.isneginf(V).any():
            raise ConfigurationError("V must be finite or +inf")
        if not (np.isfinite(A).all() and np.isfinite(w).all()):
            raise ConfigurationError("A and w must be finite")
        inner = w[(slice(1, None),) * g.d]
        if not np.allclose(inner, np.flip(inner), rtol=0, atol=1e-14 * max(1.0, np.abs(w).max())):
            raise ConfigurationError("pair potential w must be even")
        for arr in (V, A, w):
            arr.setflags(write=False)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "w_doubled", w)

    @classmethod
    def from_catalog(cls, grid: SpatialGrid, V=("zero", {}), A=("zero", {}), w=("zero", {})):
        """Build from ``(name, params)`` pairs.  ``A`` fills the first component."""
        Vv = sample(V[0], grid, **V[1])
        Ar = np.zeros((grid.d,) + grid.shape)
        a_params = dict(A[1])
        comp = int(a_params.pop("component", 0))
        Ar[comp] = sample(A[0], grid, **a_params)
        wv = profile(w[0], _offset_coords(grid), **w[1])
        return cls(grid, Vv, Ar, wv)

    @property
    def d(self) -> int:
        return self.grid.d

    @cached_property
    def w_is_zero(self) -> bool:
        return not np.any(self.w_doubled)

    @cached_property
    def _kernel_fft(self) -> np.ndarray:
        return np.fft.rfftn(np.fft.ifftshift(self.w_doubled))

    @cached_property
    def w_hat(self) -> np.ndarray:
        """Unscaled Fourier transform ``(2 pi)^(-d/2) int w e^{-ikx} dx`` on the doubled grid."""
        g = self.grid
        return np.real(np.fft.fftn(np.fft.ifftshift(self.w_doubled))) * g.weight / (2 * np.pi) ** (g.d / 2)

    @cached_property
    def convex_interaction(self) -> bool:
        wh = self.w_hat
        scale = max(np.abs(wh).max(), 1e-300)
        return bool(wh.min() >= -CONVEXITY_TOL * scale)

    @property
    def w0(self) -> float:
        return float(self.w_doubled[(self.grid.n,) * self.grid.d])

    def convolve(self, rho) -> np.ndarray:
        """Linear convolution ``(w * rho)(x_i) = sum_j w(x_i - x_j) rho_j h^d``."""
        g = self.grid
        rho = np.asarray(rho)
        if self.w_is_zero:
            return np.zeros(rho.shape, dtype=np.result_type(rho, float))
        full = (2 * g.n,) * g.d
        axes = tuple(range(rho.ndim - g.d, rho.ndim))
        if np.iscomplexobj(rho):
            kern = np.fft.fftn(np.fft.ifftshift(self.w_doubled))
            conv = np.fft.ifftn(kern * np.fft.fftn(rho, s=full, axes=axes), axes=axes)
        else:
            conv = np.fft.irfftn(self._kernel_fft * np.fft.rfftn(rho, s=full, axes=axes), s=full, axes=axes)
        idx = (Ellipsis,) + (slice(0, g.n),) * g.d
        return conv[idx] * g.weight

    def direct_energy(self, rho) -> float:
        """``D_w(rho, rho) = iint w(x - y) rho(x) rho(y)``."""
        if self.w_is_zero:
            return 0.0
        return float(integrate(rho * self.convolve(rho), self.grid))

    def potential_energy(self, rho) -> float:
        """``int V rho`` with the convention ``inf * 0 = 0`` outside hard walls."""
        rho = np.asarray(rho)
        finite = np.isfinite(self.V)
        if np.any(rho[~finite] > 0):
            return float("inf")
        return float(integrate(np.where(finite, self.V, 0.0) * rho, self.grid))

    def with_V(self, V) -> "ExternalFields":
        return ExternalFields(self.grid, V, self.A, self.w_doubled)
