"""Magnetic Dirichlet Laplacians on the grid box and their spectral projectors.

The kinetic operator is assembled as ``hbar^2 K^* K`` where ``K`` is the
forward difference along grid links carrying the Peierls phase
``exp(i/hbar * int A)``.  Each boundary node gets a ghost link to the wall half a
cell away (ghost value ``-psi``), so the free spectrum is the discrete-sine
spectrum ``(2 hbar/h)^2 sin^2(pi m / 2n)`` with eigenvectors
``sin(pi m (j + 1/2) / n)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import CapacityError, ConfigurationError, PreconditionError
from .phasespace import Density, SpatialGrid, integrate
from .tf import c_tf

log = logging.getLogger(__name__)

MAX_DENSE = 4096
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class OneBodyOperator:
    """Hermitian operator on grid functions, stored sparse in the node basis."""

    grid: SpatialGrid
    matrix: sp.csr_matrix
    hbar: float
    potential: np.ndarray | None = None

    def __post_init__(self):
        M = sp.csr_matrix(self.matrix)
        if M.shape != (self.grid.size, self.grid.size):
            raise ConfigurationError(f"operator shape {M.shape} does not match grid size {self.grid.size}")
        diff = abs(M - M.getH()).max() if M.nnz else 0.0
        scale = abs(M).max() if M.nnz else 1.0
        if diff > 1e-12 * max(scale, 1e-300):
            raise ConfigurationError(f"operator is not Hermitian (defect {diff:.3e})")
        object.__setattr__(self, "matrix", M)

    @property
    def dense(self) -> np.ndarray:
        if self.grid.size > MAX_DENSE:
            raise CapacityError(f"dense operator of size {self.grid.size} exceeds cap {MAX_DENSE}")
        return self.matrix.toarray()

    def apply(self, vectors) -> np.ndarray:
        """Apply to grid functions of shape ``(..., *grid.shape)``."""
        v = np.asarray(vectors)
        lead = v.shape[: v.ndim - self.grid.d]
        flat = v.reshape((-1, self.grid.size)).T
        return (self.matrix @ flat).T.reshape(lead + self.grid.shape)

    def shifted(self, U) -> "OneBodyOperator":
        """Same kinetic part with ``U`` added to the diagonal."""
        U = np.asarray(U, dtype=float).reshape(self.grid.shape)
        base = self.potential if self.potential is not None else 0.0
        M = self.matrix + sp.diags((U - base).ravel())
        return OneBodyOperator(self.grid, M, self.hbar, U)

    def is_tridiagonal(self) -> bool:
        return self.grid.d == 1


@dataclass(frozen=True)
class OneBodyDensityMatrix:
    """``gamma = sum_i occ_i |u_i><u_i|`` with ``int conj(u_i) u_j = delta_ij``."""

    grid: SpatialGrid
    orbitals: np.ndarray
    occupations: np.ndarray
    energies: np.ndarray | None = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        g = self.grid
        U = np.asarray(self.orbitals, dtype=complex).reshape((-1,) + g.shape)
        occ = np.asarray(self.occupations, dtype=float).reshape(-1)
        if occ.size != U.shape[0]:
            raise ConfigurationError("one occupation per orbital is required")
        if occ.size and (occ.min() < -1e-12 or occ.max() > 1 + 1e-12):
            raise PreconditionError("occupations must lie in [0, 1]")
        if U.shape[0]:
            flat = U.reshape(U.shape[0], -1)
            gram = (flat.conj() @ flat.T) * g.weight
            err = np.abs(gram - np.eye(U.shape[0])).max()
            if err > 1e-10:
                raise PreconditionError(f"orbitals are not orthonormal (defect {err:.3e})")
        object.__setattr__(self, "orbitals", U)
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def slater(cls, grid, orbitals, **kw):
        U = np.asarray(orbitals)
        return cls(grid, U, np.ones(U.reshape((-1,) + grid.shape).shape[0]), **kw)

    @property
    def rank(self) -> int:
        return self.orbitals.shape[0]

    @property
    def density(self) -> np.ndarray:
        if self.rank == 0:
            return np.zeros(self.grid.shape)
        return np.einsum("i,i...->...", self.occupations, np.abs(self.orbitals) ** 2)

    @property
    def trace(self) -> float:
        return float(self.occupations.sum())

    def is_projector(self, tol: float = 1e-12) -> bool:
        return bool(np.all((np.abs(self.occupations) <= tol) | (np.abs(self.occupations - 1) <= tol)))

    def kernel(self) -> np.ndarray:
        """Dense kernel ``gamma(x, y)`` of shape ``(size, size)``."""
        if self.grid.size > 4 * MAX_DENSE:
            raise CapacityError(f"kernel of size {self.grid.size}^2 exceeds cap")
        flat = self.orbitals.reshape(self.rank, -1)
        return (flat.T * self.occupations) @ flat.conj()

    def matrix(self) -> np.ndarray:
        """``gamma`` as a matrix acting on node values: kernel times the cell volume."""
        return self.kernel() * self.grid.weight

    def expectation(self, op: OneBodyOperator) -> float:
        """``Tr(op gamma)`` using the node-basis matrix of ``op``."""
        if self.rank == 0:
            return 0.0
        Hu = op.apply(self.orbitals)
        vals = np.real(np.sum(self.orbitals.conj() * Hu, axis=tuple(range(1, 1 + self.grid.d)))) * self.grid.weight
        return float(self.occupations @ vals)


def _link_operators(grid: SpatialGrid, A, hbar: float):
    """Forward-difference link operators (one per axis), Peierls phases included."""
    n, d = grid.n, grid.d
    A = np.asarray(A, dtype=float).reshape((d,) + grid.shape)
    idx = np.arange(grid.size).reshape(grid.shape)
    ops = []
    for ax in range(d):
        lo = [slice(None)] * d
        hi = [slice(None)] * d
        lo[ax] = slice(0, n - 1)
        hi[ax] = slice(1, n)
        a = idx[tuple(lo)].ravel()
        b = idx[tuple(hi)].ravel()
        theta = grid.h * 0.5 * (A[ax][tuple(lo)].ravel() + A[ax][tuple(hi)].ravel()) / hbar
        m = a.size
        first = [slice(None)] * d
        last = [slice(None)] * d
        first[ax] = 0
        last[ax] = n - 1
        e0 = idx[tuple(first)].ravel()
        e1 = idx[tuple(last)].ravel()
        nb = e0.size
        rows = np.concatenate([np.arange(m), np.arange(m), m + np.arange(nb), m + nb + np.arange(nb)])
        cols = np.concatenate([b, a, e0, e1])
        vals = np.concatenate([np.exp(1j * theta), -np.ones(m), np.full(nb, np.sqrt(2)), np.full(nb, np.sqrt(2))])
        ops.append(sp.csr_matrix((vals / grid.h, (rows, cols)), shape=(m + 2 * nb, grid.size)))
    return ops


def build_magnetic_dirichlet(grid: SpatialGrid, hbar: float, A=None, U=None, max_dense: int = MAX_DENSE) -> OneBodyOperator:
    """``(-i hbar grad + A)^2`` with Dirichlet walls at the box faces, plus ``U``."""
    if grid.d not in (1, 2):
        if grid.size > max_dense:
            raise CapacityError(f"d={grid.d} operator of size {grid.size} exceeds cap {max_dense}")
    if grid.d == 2 and grid.size > max_dense:
        raise CapacityError(f"d=2 operator of size {grid.size} exceeds cap {max_dense}")
    if A is None:
        A = np.zeros((grid.d,) + grid.shape)
    U = np.zeros(grid.shape) if U is None else np.asarray(U, dtype=float).reshape(grid.shape)
    if not np.all(np.isfinite(U)):
        raise ConfigurationError("scalar potential must be finite; use the grid box as the hard wall")
    H = sp.csr_matrix((grid.size, grid.size), dtype=complex)
    for K in _link_operators(grid, A, hbar):
        H = H + K.getH() @ K
    H = hbar**2 * H
    H = 0.5 * (H + H.getH()) + sp.diags(U.ravel())
    return OneBodyOperator(grid, sp.csr_matrix(H), hbar, U)


def _eigh(op: OneBodyOperator, *, count: int | None = None, upper: float | None = None):
    """Lowest eigenpairs, either the first ``count`` or all with value ``<= upper``.

    Eigenvectors are returned as columns normalised in the Euclidean node norm.
    """
    size = op.grid.size
    if op.is_tridiagonal():
        M = op.matrix.tocsr()
        diag = np.real(M.diagonal())
        off = M.diagonal(1) if size > 1 else np.zeros(0, dtype=complex)
        # diagonal unitary gauge making the off-diagonal real and non-negative
        phase = np.concatenate([[0.0], -np.cumsum(np.angle(off))])
        e = np.abs(off)
        if count is not None:
            if count == 0:
                return np.zeros(0), np.zeros((size, 0), dtype=complex)
            w, v = sla.eigh_tridiagonal(diag, e, select="i", select_range=(0, count - 1))
        else:
            w, v = sla.eigh_tridiagonal(diag, e, select="v", select_range=(-np.inf, upper))
        return w, v * np.exp(1j * phase)[:, None]
    dense = op.dense
    if count is not None:
        if count == 0:
            return np.zeros(0), np.zeros((size, 0), dtype=complex)
        return sla.eigh(dense, subset_by_index=(0, count - 1))
    lo = np.real(dense.diagonal()).min() - 2 * np.abs(dense).sum(axis=1).max() - 1.0
    if upper < lo:
        return np.zeros(0), np.zeros((size, 0), dtype=complex)
    return sla.eigh(dense, subset_by_value=(lo, upper))


def eigenvalues(op: OneBodyOperator, count: int | None = None) -> np.ndarray:
    """Lowest ``count`` eigenvalues (all when ``count`` is None)."""
    count = op.grid.size if count is None else count
    if op.is_tridiagonal():
        return _eigh(op, count=count)[0]
    return sla.eigh(op.dense, eigvals_only=True, subset_by_index=(0, count - 1))


def _as_density_matrix(op, w, v, notes=()):
    orbitals = (v.T / np.sqrt(op.grid.weight)).reshape((-1,) + op.grid.shape)
    return OneBodyDensityMatrix(op.grid, orbitals, np.ones(w.size), energies=np.asarray(w), notes=tuple(notes))


def _threshold_tol(op: OneBodyOperator, level: float) -> float:
    """Closed-inclusion slack: relative round-off of the operator scale."""
    scale = float(np.abs(op.matrix.diagonal()).max(initial=0.0))
    return DEGENERACY_TOL * max(1.0, abs(level), scale)


def spectral_projector(op: OneBodyOperator, level: float = 0.0) -> OneBodyDensityMatrix:
    """``1(H <= level)``; eigenvalues within round-off of the level are included."""
    tol = _threshold_tol(op, level)
    w, v = _eigh(op, upper=level + 2 * tol)
    notes = []
    near = np.abs(w - level) <= tol
    if near.any():
        msg = f"{int(near.sum())} eigenvalue(s) within {tol:.3g} of level {level:g}; included"
        log.warning(msg)
        notes.append(msg)
    keep = w <= level + tol
    return _as_density_matrix(op, w[keep], v[:, keep], notes)


def lowest_n_projector(op: OneBodyOperator, N: int) -> OneBodyDensityMatrix:
    """Projector onto the ``N`` lowest eigenvectors (Aufbau filling)."""
    size = op.grid.size
    if N < 0 or N > size:
        raise PreconditionError(f"cannot fill {N} states on a grid of size {size}")
    k = min(N + 1, size)
    w, v = _eigh(op, count=k)
    notes = []
    if N < size and N > 0 and abs(w[N] - w[N - 1]) <= _threshold_tol(op, w[N]):
        msg = f"eigenvalues {N - 1} and {N} are degenerate at {w[N]:.15g}; solver order kept"
        log.warning(msg)
        notes.append(msg)
    return _as_density_matrix(op, w[:N], v[:, :N], notes)


def kinetic_trace(op: OneBodyOperator, gamma: OneBodyDensityMatrix) -> float:
    """``Tr (-i hbar grad + A)^2 gamma``: total trace minus the potential part."""
    U = op.potential if op.potential is not None else np.zeros(op.grid.shape)
    return gamma.expectation(op) - float(integrate(U * gamma.density, op.grid))


@dataclass
class WeylRow:
    N: int
    hbar: float
    count_ratio: float
    count_target: float
    kinetic: float
    kinetic_target: float
    sup_density: float
    c_obs: float

    @property
    def count_error(self) -> float:
        return abs(self.count_ratio - self.count_target) / self.count_target if self.count_target else abs(self.count_ratio)

    @property
    def kinetic_error(self) -> float:
        if self.kinetic_target:
            return abs(self.kinetic - self.kinetic_target) / self.kinetic_target
        return abs(self.kinetic)


def weyl_report(rho_target: Density, N_list, A=None, grid: SpatialGrid | None = None) -> list[WeylRow]:
    """Compare ``gamma_N = 1(H_N <= 0)``, ``H_N = (-i hbar grad + A)^2 - c_TF rho^(2/d)``,
    with its semi-classical limits for each ``N`` (``hbar = N^(-1/d)``)."""
    g = rho_target.grid if grid is None else grid
    d = g.d
    c = c_tf(d)
    rho = rho_target.values
    U = -c * rho ** (2 / d)
    mass = rho_target.mass
    kin_target = d / (d + 2) * c * integrate(rho ** (1 + 2 / d), g)
    rmax = float(rho.max(initial=0.0))
    rows = []
    for N in N_list:
        hbar = float(N) ** (-1.0 / d)
        op = build_magnetic_dirichlet(g, hbar, A, U)
        gam = spectral_projector(op, 0.0)
        kin = kinetic_trace(op, gam) if gam.rank else 0.0
        sup = float(gam.density.max()) / N if gam.rank else 0.0
        c_obs = sup / rmax ** (d / 2) if rmax > 0 else 0.0
        rows.append(WeylRow(int(N), hbar, gam.trace / N, mass, kin / N, kin_target, sup, c_obs))
    return rows
