"""Coherent states, Husimi and Wigner functions of one-body density matrices.

Coherent states are built on the spatial grid from a real, even window that is
sampled, wrapped periodically and renormalised to unit discrete norm.  On a
phase grid dual to the spatial grid under :func:`fourier_hbar` the family
then resolves the identity exactly, so the normalisation and marginal
identities of the Husimi functions hold to round-off.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .phasespace import PhaseGrid, PhaseSpaceMeasure, Scaling, SpatialGrid, fourier_hbar, integrate
from .spectral import OneBodyDensityMatrix

log = logging.getLogger(__name__)

TRUNCATION_TOL = 1e-8


def _gaussian(u, scale):
    return np.pi ** (-0.25) * scale ** (-0.5) * np.exp(-0.5 * (u / scale) ** 2)


def _sech(u, scale):
    return (2 * scale) ** (-0.5) / np.cosh(u / scale)


def _cos2(u, scale):
    # cos^2 bump supported on |u| < scale, normalised in L^2
    c = np.sqrt(4 / (3 * scale))
    return np.where(np.abs(u) < scale, c * np.cos(np.pi * u / (2 * scale)) ** 2, 0.0)


_WINDOWS = {"gaussian": (_gaussian, 40.0), "sech": (_sech, 60.0), "cos2": (_cos2, 1.0)}


@dataclass(frozen=True)
class CoherentWindow:
    """Real even window ``f`` with ``int f^2 = 1`` on ``R^d`` (product over axes).

    ``kind`` is ``"gaussian"`` (``pi^-1/4 e^{-x^2/2}`` at ``scale=1``),
    ``"sech"`` or ``"cos2"``; ``scale`` dilates the profile.
    """

    kind: str = "gaussian"
    scale: float = 1.0
    d: int = 1
    fine_n: int = 2**16

    def __post_init__(self):
        if self.kind not in _WINDOWS:
            raise ConfigurationError(f"unknown window {self.kind!r}; choose from {sorted(_WINDOWS)}")
        if not self.scale > 0:
            raise ConfigurationError("window scale must be positive")
        u, f = self.fine_samples
        du = u[1] - u[0]
        if abs(np.sum(f**2) * du - 1) > 1e-10:
            raise PreconditionError("window is not normalised on its fine grid")
        if np.abs(f - f[::-1]).max() > 1e-14:
            raise PreconditionError("window must be even")

    def profile1(self, u) -> np.ndarray:
        fn, _ = _WINDOWS[self.kind]
        return fn(np.asarray(u, dtype=float), self.scale)

    def profile(self, coords) -> np.ndarray:
        out = 1.0
        for c in coords:
            out = out * self.profile1(c)
        return out

    @property
    def is_gaussian(self) -> bool:
        return self.kind == "gaussian" and self.scale == 1.0

    @cached_property
    def fine_samples(self):
        _, extent = _WINDOWS[self.kind]
        L = extent * self.scale
        # symmetric periodic grid of fine_n cells on [-L, L)
        u = -L + (np.arange(self.fine_n) + 0.5) * (2 * L / self.fine_n)
        return u, self.profile1(u)

    @cached_property
    def grad_norm2(self) -> float:
        """``int |grad f|^2`` over ``R^d`` from a spectral derivative on the fine grid."""
        u, f = self.fine_samples
        du = u[1] - u[0]
        k = 2 * np.pi * np.fft.fftfreq(u.size, du)
        df = np.real(np.fft.ifft(1j * k * np.fft.fft(f)))
        one = float(np.sum(df**2) * du)
        # product window: each axis contributes one derivative term
        return self.d * one

    def sampled(self, grid: SpatialGrid, hbar: float) -> np.ndarray:
        """``f^hbar`` on ``grid``, centred at node offset 0 in wrap order, unit discrete norm."""
        if grid.d != self.d:
            raise ConfigurationError(f"window is {self.d}-dimensional, grid is {grid.d}-dimensional")
        k = np.arange(grid.n)
        k = np.where(k < grid.n // 2, k, k - grid.n) * grid.h
        axes = np.meshgrid(*([k / np.sqrt(hbar)] * grid.d), indexing="ij")
        w = hbar ** (-grid.d / 4) * self.profile(axes)
        norm2 = integrate(w**2, grid)
        if not norm2 > 0:
            raise ConfigurationError("window is not resolved by the grid")
        return w / np.sqrt(norm2)

    def momentum_profile2(self, grid: SpatialGrid, hbar: float) -> np.ndarray:
        """``|g^hbar|^2`` on the momentum axis of :func:`fourier_hbar` (``p = 0`` at index ``n/2``)."""
        w = self.sampled(grid, hbar)
        centred = np.fft.fftshift(w)  # offset zero moves to index n/2
        shift = fourier_hbar(centred, grid, hbar)
        return np.abs(shift) ** 2


def _check_phase(phase: PhaseGrid, hbar: float):
    if phase.hbar is None or abs(phase.hbar - hbar) > 1e-14 * hbar or not phase.matches_fft():
        raise ConfigurationError(
            "Husimi and Wigner transforms need the phase grid dual to the spatial grid "
            "(PhaseGrid.for_hbar with the same hbar)"
        )


def coherent_state(window: CoherentWindow, grid: SpatialGrid, hbar: float, x, p) -> np.ndarray:
    """``hbar^(-d/4) f((y - x)/sqrt(hbar)) exp(i p.y/hbar)`` sampled on ``grid``.

    Warns when the window sticks out of the box by more than the tolerance and
    returns the state renormalised to unit discrete norm.
    """
    x = np.broadcast_to(np.asarray(x, dtype=float), (grid.d,))
    p = np.broadcast_to(np.asarray(p, dtype=float), (grid.d,))
    coords = grid.coords()
    amp = hbar ** (-grid.d / 4) * window.profile([(c - xi) / np.sqrt(hbar) for c, xi in zip(coords, x)])
    mass = integrate(amp**2, grid)
    if abs(1 - mass) > TRUNCATION_TOL:
        warnings.warn(f"coherent state at x={x.tolist()} truncated: grid mass {mass:.10f}", RuntimeWarning, stacklevel=2)
    phase = np.exp(1j * sum(pi * c for pi, c in zip(p, coords)) / hbar)
    return amp * phase / np.sqrt(mass)


def _shift_indices(grid: SpatialGrid, flat_rows):
    """Index tuple selecting ``w(y - x_a)`` from a wrap-ordered window for rows ``a``."""
    rows = np.unravel_index(np.asarray(flat_rows), grid.shape)
    j = np.arange(grid.n)
    idx = []
    for ax in range(grid.d):
        shape = [len(flat_rows)] + [1] * grid.d
        jshape = [1] + [1] * grid.d
        jshape[1 + ax] = grid.n
        idx.append((j.reshape(jshape) - rows[ax].reshape(shape)) % grid.n)
    return tuple(idx)


def _overlaps(orbitals, window: CoherentWindow, phase: PhaseGrid, rows=None, batch: int = 64) -> np.ndarray:
    """``c[i, a, m] = <psi_i, f_{x_a, p_m}>`` with ``a`` flattened over space and ``m`` over momenta."""
    g, hbar = phase.xgrid, phase.hbar
    w = window.sampled(g, hbar)
    U = np.asarray(orbitals, dtype=complex).reshape((-1,) + g.shape)
    rows = np.arange(g.size) if rows is None else np.asarray(rows)
    out = np.empty((U.shape[0], rows.size, g.size), dtype=complex)
    scale = (2 * np.pi * hbar) ** (g.d / 2)
    for s in range(0, rows.size, batch):
        chunk = rows[s : s + batch]
        win = w[_shift_indices(g, chunk)]
        prod = U[:, None] * win[None]
        F = fourier_hbar(prod, g, hbar)
        out[:, s : s + chunk.size] = scale * np.conj(F.reshape(U.shape[0], chunk.size, -1))
    return out


def _occupied(gamma: OneBodyDensityMatrix):
    occ = np.asarray(gamma.occupations, dtype=float)
    if occ.size and (occ.min() < -1e-12 or occ.max() > 1 + 1e-12):
        raise PreconditionError("occupations must lie in [0, 1]")
    return gamma.orbitals, occ


def husimi1(gamma: OneBodyDensityMatrix, window: CoherentWindow, phase: PhaseGrid) -> PhaseSpaceMeasure:
    """One-particle Husimi function ``sum_i occ_i |<psi_i, f_{x,p}>|^2``.

    Each ``(orbital, x)`` row is one FFT of ``psi_i(y) f^hbar(y - x)``.
    """
    _check_phase(phase, phase.hbar)
    U, occ = _occupied(gamma)
    m = np.zeros(phase.xgrid.size * phase.xgrid.size)
    if U.shape[0]:
        c = _overlaps(U, window, phase)
        m = np.einsum("i,iaz->az", occ, np.abs(c) ** 2).ravel()
    return PhaseSpaceMeasure(phase, m.reshape(phase.shape), kind="husimi")


@dataclass
class TwoBodyHusimi:
    """Rows ``z1`` (flat phase-space indices) of ``m2(z1, z2)`` over all ``z2``."""

    grid: PhaseGrid
    rows: np.ndarray
    values: np.ndarray

    def marginal(self) -> np.ndarray:
        """``(2 pi)^-d int m2(z1, z2) dz2`` for each stored row."""
        return self.values.sum(axis=1) * self.grid.weight / (2 * np.pi) ** self.grid.d


def _require_projector(gamma: OneBodyDensityMatrix):
    if not gamma.is_projector():
        raise PreconditionError("two-particle Husimi functions need a Slater state (occupations 0 or 1)")
    return gamma.orbitals[gamma.occupations > 0.5]


def husimi2(gamma: OneBodyDensityMatrix, window: CoherentWindow, phase: PhaseGrid, rows=None) -> TwoBodyHusimi:
    """Two-particle Husimi function of a Slater state,
    ``m1(z1) m1(z2) - |<f_z1, gamma f_z2>|^2``, for the requested ``z1`` rows."""
    _check_phase(phase, phase.hbar)
    U = _require_projector(gamma)
    size = phase.xgrid.size**2
    rows = np.arange(size) if rows is None else np.asarray(rows, dtype=int).ravel()
    c = _overlaps(U, window, phase).reshape(U.shape[0], size)
    m1 = np.sum(np.abs(c) ** 2, axis=0)
    cross = np.conj(c[:, rows]).T @ c
    values = m1[rows, None] * m1[None, :] - np.abs(cross) ** 2
    return TwoBodyHusimi(phase, rows, values)


def husimi2_summary(gamma: OneBodyDensityMatrix, window: CoherentWindow, phase: PhaseGrid, chunk: int = 512) -> dict:
    """Bounds, normalisation, marginal and symmetry of the full ``m2``, streamed in row blocks."""
    _check_phase(phase, phase.hbar)
    U = _require_projector(gamma)
    N, d, hbar = U.shape[0], phase.d, phase.hbar
    c = _overlaps(U, window, phase).reshape(N, -1)
    m1 = np.sum(np.abs(c) ** 2, axis=0)
    norm = phase.weight / (2 * np.pi) ** d
    lo, hi, total, sym = np.inf, -np.inf, 0.0, 0.0
    marginal = np.empty_like(m1)
    for s in range(0, m1.size, chunk):
        rows = slice(s, s + chunk)
        block = m1[rows, None] * m1[None, :] - np.abs(np.conj(c[:, rows]).T @ c) ** 2
        lo, hi = min(lo, block.min()), max(hi, block.max())
        marginal[rows] = block.sum(axis=1) * norm
        diag = block[:, rows]
        sym = max(sym, float(np.abs(diag - diag.T).max()))
    total = float(marginal.sum() * norm)
    target = hbar**d * (N - 1) * m1
    return {
        "min": float(lo),
        "max": float(hi),
        "mass": total,
        "mass_target": float(N * (N - 1) * hbar ** (2 * d)),
        "marginal_error": _rel_l1(marginal, target) if np.any(target) else float(np.abs(marginal).sum()),
        "symmetry_error": sym,
    }


def factorization_defect(gamma: OneBodyDensityMatrix, window: CoherentWindow, phase: PhaseGrid) -> float:
    """``||m2 - m1 (x) m1||_L1 / (2 pi)^(2d)`` without forming ``m2``.

    The integrand is ``|<f_z1, gamma f_z2>|^2 >= 0``, whose integral is
    ``Tr(M^2)`` with ``M_ij = int <psi_i, f_z><f_z, psi_j> dz``.
    """
    _check_phase(phase, phase.hbar)
    U = _require_projector(gamma)
    c = _overlaps(U, window, phase).reshape(U.shape[0], -1)
    M = (c @ np.conj(c).T) * phase.weight
    return float(np.real(np.sum(M * M.T))) / (2 * np.pi) ** (2 * phase.d)


def l1_distance(m, other, grid: PhaseGrid | None = None) -> float:
    """``(2 pi)^-d int |m - other|`` over the phase grid."""
    grid = m.grid if grid is None else grid
    a = m.values if isinstance(m, PhaseSpaceMeasure) else np.asarray(m)
    b = other.values if isinstance(other, PhaseSpaceMeasure) else np.asarray(other)
    return float(np.sum(np.abs(a - b)) * grid.weight / (2 * np.pi) ** grid.d)


def window_discrepancy(gamma, window_a: CoherentWindow, window_b: CoherentWindow, phase: PhaseGrid) -> float:
    """L1 distance between the Husimi functions built from two windows."""
    return l1_distance(husimi1(gamma, window_a, phase), husimi1(gamma, window_b, phase))


def _circular_convolve(a, b, axes):
    return np.real(np.fft.ifftn(np.fft.fftn(a, axes=axes) * np.fft.fftn(b, axes=axes), axes=axes))


def _rel_l1(a, b) -> float:
    scale = np.sum(np.abs(b))
    diff = np.sum(np.abs(a - b))
    return float(diff / scale) if scale > 0 else float(diff)


def resolution_identity_check(window: CoherentWindow, phase: PhaseGrid, probes) -> list[float]:
    """Relative error of ``(2 pi hbar)^-d iint f_z <f_z, u> dz`` against ``u`` per probe."""
    _check_phase(phase, phase.hbar)
    g, hbar = phase.xgrid, phase.hbar
    w = window.sampled(g, hbar)
    out = []
    for u in probes:
        u = np.asarray(u, dtype=complex).reshape(g.shape)
        norm = np.sqrt(integrate(np.abs(u) ** 2, g))
        if norm == 0:
            out.append(0.0)
            continue
        c = _overlaps(u[None], window, phase)[0]  # <u, f_z>
        # rebuild: sum_z f_z conj(c_z); the p-sum is an inverse transform per row
        coeff = np.conj(c).reshape((g.size,) + g.shape)
        rebuilt = np.zeros(g.shape, dtype=complex)
        for a in range(g.size):
            wave = fourier_hbar(coeff[a], g, hbar, "inverse") * (2 * np.pi * hbar) ** (g.d / 2)
            rebuilt += w[_shift_indices(g, [a])][0] * wave / phase.weight * g.weight
        rebuilt *= phase.weight / (2 * np.pi * hbar) ** g.d
        out.append(float(np.sqrt(integrate(np.abs(rebuilt - u) ** 2, g)) / norm))
    return out


@dataclass
class IdentityReport:
    name: str
    lhs: float | np.ndarray
    rhs: float | np.ndarray
    error: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def husimi_density_marginals(m1: PhaseSpaceMeasure, gamma: OneBodyDensityMatrix, window: CoherentWindow, tol: float = 1e-6):
    """Position and momentum marginals of ``m1`` against
    ``hbar^d rho * |f^hbar|^2`` and ``hbar^d t * |g^hbar|^2``."""
    phase = m1.grid
    g, hbar, d = phase.xgrid, phase.hbar, phase.d
    _check_phase(phase, hbar)
    vals = m1.values.reshape(g.shape + g.shape)
    sp_axes = tuple(range(d))
    p_axes = tuple(range(d, 2 * d))
    x_marg = vals.sum(axis=p_axes) * phase.h_p**d / (2 * np.pi) ** d
    p_marg = vals.sum(axis=sp_axes) * g.h**d / (2 * np.pi) ** d

    w = window.sampled(g, hbar)
    rho = gamma.density
    x_ref = hbar**d * _circular_convolve(rho, w**2, tuple(range(d))) * g.weight

    U, occ = _occupied(gamma)
    F = fourier_hbar(U, g, hbar)
    t = np.einsum("i,i...->...", occ, np.abs(F) ** 2)
    G = window.momentum_profile2(g, hbar)
    # |g|^2 has p = 0 at index n/2; move it to index 0 for the circular sum
    p_ref = hbar**d * _circular_convolve(t, np.fft.ifftshift(G), tuple(range(d))) * phase.h_p**d
    return [
        IdentityReport("husimi x-marginal", x_marg, x_ref, _rel_l1(x_marg, x_ref), tol),
        IdentityReport("husimi p-marginal", p_marg, p_ref, _rel_l1(p_marg, p_ref), tol),
    ]


def _occ_sum(occ, arr):
    return np.sum(occ.reshape((-1,) + (1,) * (arr.ndim - 1)) * arr)


def _spectral_gradient(U, grid: SpatialGrid, hbar: float):
    """``-i hbar grad`` of each orbital, one component per axis, via :func:`fourier_hbar`."""
    F = fourier_hbar(U, grid, hbar)
    p = grid.momentum_axis(hbar)
    out = []
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.n
        out.append(fourier_hbar(F * p.reshape(shape), grid, hbar, "inverse"))
    return out


def kinetic_identity_check(gamma: OneBodyDensityMatrix, window: CoherentWindow, phase: PhaseGrid, A=None, m1=None):
    """Kinetic energy from the Husimi function.

    Without ``A``: ``Tr(-hbar^2 Lap gamma) = (2 pi hbar)^-d iint |p|^2 m1 - N hbar int |grad f|^2``
    (tolerance 1e-6).  With ``A`` the magnetic kinetic energy is matched by the
    four-term sum (tolerance 1e-5).  Derivatives are spectral.
    """
    g, hbar, d = phase.xgrid, phase.hbar, phase.d
    _check_phase(phase, hbar)
    U, occ = _occupied(gamma)
    N = float(occ.sum())
    if m1 is None:
        m1 = husimi1(gamma, window, phase)
    vals = m1.values.reshape(g.shape + g.shape)
    pc = np.meshgrid(*([g.momentum_axis(hbar)] * d), indexing="ij")
    magnetic = A is not None and np.any(A)
    A = np.zeros((d,) + g.shape) if A is None else np.asarray(A, dtype=float).reshape((d,) + g.shape)
    grads = _spectral_gradient(U, g, hbar) if U.shape[0] else [np.zeros((0,) + g.shape)] * d
    sx = (Ellipsis,) + (None,) * d
    px = (None,) * d + (Ellipsis,)

    if not magnetic:
        lhs = float(sum(_occ_sum(occ, np.abs(D) ** 2) for D in grads) * g.weight)
        p2 = sum(pi**2 for pi in pc)
        term1 = float(np.sum(vals * p2[px]) * phase.weight / (2 * np.pi * hbar) ** d)
        term2 = -N * hbar * window.grad_norm2
        rhs = term1 + term2
        err = abs(lhs - rhs) / max(abs(lhs), 1e-300) if lhs else abs(rhs)
        return IdentityReport("kinetic energy", lhs, rhs, err, 1e-6, {"husimi": term1, "window": term2})

    cov = [D + A[ax][None] * U for ax, D in enumerate(grads)]
    lhs = float(sum(_occ_sum(occ, np.abs(D) ** 2) for D in cov) * g.weight)
    shift2 = sum((pc[ax][px] + A[ax][sx]) ** 2 for ax in range(d))
    term1 = float(np.sum(vals * shift2) * phase.weight / (2 * np.pi * hbar) ** d)
    term2 = -N * hbar * window.grad_norm2
    w2 = window.sampled(g, hbar) ** 2
    axes = tuple(range(d))
    smear = lambda a: _circular_convolve(a, w2, axes) * g.weight  # noqa: E731
    rho = gamma.density
    term3 = 0.0
    for ax in range(d):
        dA = A[ax] - smear(A[ax])
        term3 += 2 * float(np.real(_occ_sum(occ, np.conj(U) * dA[None] * grads[ax])) * g.weight)
    A2 = sum(a**2 for a in A)
    term4 = float(integrate((A2 - smear(A2)) * rho, g))
    rhs = term1 + term2 + term3 + term4
    err = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return IdentityReport(
        "magnetic kinetic energy", lhs, rhs, err, 1e-5,
        {"husimi": term1, "window": term2, "cross": term3, "A2": term4},
    )


def _half_shift(U, grid: SpatialGrid):
    """Values at ``y + h/2`` by band-limited interpolation (Nyquist mode dropped)."""
    k = 2 * np.pi * np.fft.fftfreq(grid.n, grid.h)
    mult = np.exp(0.5j * k * grid.h)
    mult[grid.n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(U, axis=-1) * mult, axis=-1)


def wigner1(gamma: OneBodyDensityMatrix, scaling: Scaling, phase: PhaseGrid) -> PhaseSpaceMeasure:
    """``W(x, p) = hbar^-1 N^-1 int e^{-i p s/hbar} gamma(x + s/2, x - s/2) ds`` (d = 1).

    With this normalisation ``iint W = 2 pi`` for any ``N``-particle state.
    Half-node values of the orbitals come from band-limited interpolation.
    """
    g, hbar = phase.xgrid, phase.hbar
    _check_phase(phase, hbar)
    if g.d != 1:
        raise ConfigurationError("wigner1 is implemented for d = 1")
    U, occ = _occupied(gamma)
    n = g.n
    N = scaling.N
    W = np.zeros((n, n))
    if not U.shape[0]:
        return PhaseSpaceMeasure(phase, W, kind="wigner")
    dense = np.zeros((U.shape[0], 2 * n), dtype=complex)
    dense[:, 0::2] = U
    dense[:, 1::2] = _half_shift(U, g)
    a = np.arange(n)[:, None]
    k = (np.arange(2 * n) + n) % (2 * n) - n  # wrap order, offsets -n..n-1
    plus, minus = 2 * a + k[None], 2 * a - k[None]
    valid = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
    plus, minus = np.clip(plus, 0, 2 * n - 1), np.clip(minus, 0, 2 * n - 1)
    kern = np.zeros((n, 2 * n), dtype=complex)
    for i in range(U.shape[0]):
        kern += occ[i] * dense[i][plus] * np.conj(dense[i][minus])
    kern *= valid
    spectrum = np.fft.fft(kern, axis=1)
    q = (2 * np.arange(n) - n) % (2 * n)
    W = np.real(spectrum[:, q]) * g.h / (hbar * N)
    return PhaseSpaceMeasure(phase, W, kind="wigner")


def gaussian_kernel(phase: PhaseGrid) -> np.ndarray:
    """``(pi hbar)^-d exp(-(|x|^2 + |p|^2)/hbar)`` at wrap-ordered phase-space offsets."""
    g, hbar = phase.xgrid, phase.hbar
    k = np.arange(g.n)
    k = np.where(k < g.n // 2, k, k - g.n)
    axes = [k * g.h] * g.d + [k * phase.h_p] * g.d
    coords = np.meshgrid(*axes, indexing="ij")
    return (np.pi * hbar) ** (-g.d) * np.exp(-sum(c**2 for c in coords) / hbar)


def wigner_husimi_convolution_check(gamma, scaling: Scaling, phase: PhaseGrid, window: CoherentWindow | None = None, tol: float = 1e-6):
    """Compare ``m1`` with ``N hbar^d (W * G^hbar)`` for the Gaussian window."""
    window = CoherentWindow("gaussian", d=phase.d) if window is None else window
    if not window.is_gaussian:
        raise PreconditionError("the Wigner-Husimi convolution identity needs the unit Gaussian window")
    m1 = husimi1(gamma, window, phase)
    W = wigner1(gamma, scaling, phase)
    axes = tuple(range(2 * phase.d))
    conv = _circular_convolve(W.values, gaussian_kernel(phase), axes) * phase.weight
    rhs = scaling.N * phase.hbar**phase.d * conv
    err = _rel_l1(m1.values, rhs) if np.any(m1.values) else float(np.sum(np.abs(rhs)))
    return IdentityReport("wigner-husimi convolution", m1.values, rhs, err, tol)


def oscillator_orbitals(grid: SpatialGrid, count: int, hbar: float) -> np.ndarray:
    """First ``count`` eigenfunctions of ``-hbar^2 d^2/dx^2 + x^2`` (d = 1), orthonormalised on the grid."""
    if grid.d != 1:
        raise ConfigurationError("oscillator_orbitals is implemented for d = 1")
    u = grid.axis / np.sqrt(hbar)
    out = np.zeros((count, grid.n))
    prev = np.zeros(grid.n)
    cur = np.pi ** (-0.25) * np.exp(-0.5 * u**2)
    for k in range(count):
        out[k] = cur
        nxt = np.sqrt(2 / (k + 1)) * u * cur - np.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
    out *= hbar ** (-0.25)
    # remove the quadrature error so the Gram matrix is the identity to round-off
    q, r = np.linalg.qr(out.T * np.sqrt(grid.h))
    q = q * np.sign(np.diag(r))
    return (q / np.sqrt(grid.h)).T


def oscillator_state(grid: SpatialGrid, N: int) -> OneBodyDensityMatrix:
    """Slater state of the ``N`` lowest oscillator modes with ``hbar = N^(-1/d)``."""
    hbar = Scaling(N, grid.d).hbar
    return OneBodyDensityMatrix.slater(grid, oscillator_orbitals(grid, N, hbar))
