"""Slater states, reduced Hartree-Fock and small exact diagonalisations.

All energies follow the mean-field scaling: one-body terms carry weight one,
pair interactions carry ``1/N``, and per-particle quantities divide by ``N``.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, ConfigurationError, IterationError, PreconditionError
from .fields import ExternalFields
from .phasespace import Density, Scaling, SpatialGrid, fourier_hbar, integrate
from .spectral import (
    OneBodyDensityMatrix,
    OneBodyOperator,
    build_magnetic_dirichlet,
    kinetic_trace,
    lowest_n_projector,
)
from .tf import TFSolution

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlaterState:
    """``N`` orthonormal orbitals (function normalisation) and the scaling."""

    grid: SpatialGrid
    orbitals: np.ndarray
    scaling: Scaling

    def __post_init__(self):
        U = np.asarray(self.orbitals, dtype=complex).reshape((-1,) + self.grid.shape)
        flat = U.reshape(U.shape[0], -1)
        gram = flat.conj() @ flat.T * self.grid.weight
        if np.abs(gram - np.eye(U.shape[0])).max() > 1e-10:
            raise PreconditionError("Slater orbitals must be orthonormal")
        object.__setattr__(self, "orbitals", U)

    @classmethod
    def from_gamma(cls, gamma: OneBodyDensityMatrix, scaling: Scaling | None = None):
        if not gamma.is_projector():
            raise PreconditionError("a Slater state needs occupations in {0, 1}")
        U = gamma.orbitals[gamma.occupations > 0.5]
        return cls(gamma.grid, U, scaling or Scaling(max(U.shape[0], 1), gamma.grid.d))

    @property
    def N(self) -> int:
        return self.orbitals.shape[0]

    def gamma(self) -> OneBodyDensityMatrix:
        return OneBodyDensityMatrix.slater(self.grid, self.orbitals)


@dataclass
class ReducedDensities:
    grid: SpatialGrid
    rho1: np.ndarray
    rho2: np.ndarray
    t1: np.ndarray


def reduced_densities(slater: SlaterState) -> ReducedDensities:
    """``rho1``, ``rho2(x, y) = (rho(x) rho(y) - |gamma(x, y)|^2) / 2`` and the
    momentum density ``t1 = sum_i |F_hbar psi_i|^2``."""
    g = slater.grid
    flat = slater.orbitals.reshape(slater.N, -1)
    rho = np.sum(np.abs(flat) ** 2, axis=0)
    kern = flat.T @ flat.conj()
    rho2 = 0.5 * (np.outer(rho, rho) - np.abs(kern) ** 2)
    F = fourier_hbar(slater.orbitals, g, slater.scaling.hbar)
    t1 = np.sum(np.abs(F) ** 2, axis=0)
    return ReducedDensities(g, rho.reshape(g.shape), rho2, t1)


def one_body_operator(fields: ExternalFields, hbar: float) -> OneBodyOperator:
    return build_magnetic_dirichlet(fields.grid, hbar, fields.A, fields.V)


def rhf_energy(gamma: OneBodyDensityMatrix, fields: ExternalFields, scaling: Scaling, op=None) -> float:
    """Per-particle reduced Hartree-Fock energy
    ``Tr(h gamma)/N + D_w(rho, rho) / (2 N^2)``."""
    if gamma.rank == 0:
        return 0.0
    op = one_body_operator(fields, scaling.hbar) if op is None else op
    N = scaling.N
    rho = gamma.density
    return gamma.expectation(op) / N + fields.direct_energy(rho) / (2 * N**2)


def hf_exchange(gamma: OneBodyDensityMatrix, fields: ExternalFields, N: int | None = None, chunk: int = 16) -> float:
    """Exchange term ``-(2N)^-1 iint w(x - y) |gamma(x, y)|^2`` (total, not per particle)."""
    if fields.w_is_zero or gamma.rank == 0:
        return 0.0
    N = gamma.trace if N is None else N
    g = gamma.grid
    U = gamma.orbitals * np.sqrt(gamma.occupations).reshape((-1,) + (1,) * g.d)
    total = 0.0
    # |gamma(x,y)|^2 = sum_ij (u_i conj u_j)(x) conj(u_i conj u_j)(y)
    for i in range(gamma.rank):
        for j0 in range(0, gamma.rank, chunk):
            pair = U[i] * U[j0 : j0 + chunk].conj()
            conv = fields.convolve(pair.conj())
            total += float(np.real(np.sum(pair * conv)) * g.weight)
    return -total / (2 * N)


@dataclass
class RHFResult:
    gamma: OneBodyDensityMatrix
    energy: float
    iterations: int
    converged: bool
    residual: float
    history: list = field(default_factory=list)


def rhf_minimize(
    fields: ExternalFields,
    scaling: Scaling,
    max_iter: int = 200,
    mixing: float = 0.5,
    energy_tol: float = 1e-9,
    density_tol: float = 1e-7,
    strict: bool = True,
) -> RHFResult:
    """Self-consistent field loop with Aufbau filling and linear density mixing.

    Every trial state is recorded in ``history`` as ``(step, energy, residual,
    accepted)``; a trial is accepted only if it does not raise the energy of the
    last accepted state, so the returned energy never exceeds the Aufbau start.
    """
    if not (fields.w_is_zero or fields.convex_interaction):
        raise PreconditionError("rhf_minimize needs w = 0 or a non-negative Fourier transform of w")
    N, hbar = scaling.N, scaling.hbar
    op0 = one_body_operator(fields, hbar)
    gamma = lowest_n_projector(op0, N)
    energy = rhf_energy(gamma, fields, scaling, op0)
    rho_in = gamma.density
    history = [(0, energy, float("nan"), True)]
    if fields.w_is_zero:
        return RHFResult(gamma, energy, 1, True, 0.0, history)
    theta = float(mixing)
    previous = energy
    residual = float("inf")
    for it in range(1, max_iter + 1):
        op = op0.shifted(fields.V + fields.convolve(rho_in) / N)
        trial = lowest_n_projector(op, N)
        e_trial = rhf_energy(trial, fields, scaling, op0)
        rho_out = trial.density
        residual = float(np.abs(rho_out - rho_in).max()) / N
        accepted = e_trial <= energy
        history.append((it, e_trial, residual, accepted))
        if accepted:
            gamma, energy = trial, e_trial
        if abs(previous - e_trial) <= energy_tol and residual <= density_tol:
            return RHFResult(gamma, energy, it, True, residual, history)
        previous = e_trial
        rho_in = (1 - theta) * rho_in + theta * rho_out
    if strict:
        raise IterationError(f"SCF did not converge in {max_iter} iterations", residual, history)
    return RHFResult(gamma, energy, max_iter, False, residual, history)


def lieb_thirring_ratio(slater, op: OneBodyOperator | None = None) -> float:
    """``int rho^(1+2/d) / Tr(-Laplacian gamma)`` using the grid kinetic operator."""
    gamma = slater.gamma() if isinstance(slater, SlaterState) else slater
    g = gamma.grid
    if op is None:
        op = build_magnetic_dirichlet(g, 1.0)
    kin = kinetic_trace(op, gamma) / op.hbar**2
    if not kin > 0:
        raise PreconditionError("kinetic energy vanishes; ratio undefined")
    return float(integrate(gamma.density ** (1 + 2 / g.d), g) / kin)


def lieb_oxford_check(points, eta: Density, f_profile) -> dict:
    """Check ``sum_{k<k'} f(z_k - z_k') >= -f(0) K/2 + sum_k f*eta(z_k) - D_f(eta, eta)/2``.

    ``points`` is an array of configurations with shape ``(..., K, d)``;
    ``f_profile`` is a callable mapping displacement arrays (last axis ``d``)
    to values.  ``eta`` is integrated with the grid quadrature.
    """
    g = eta.grid
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 2:
        pts = pts[None]
    K = pts.shape[-2]
    nodes = np.stack([c.ravel() for c in g.coords()], axis=-1)
    eta_w = eta.values.ravel() * g.weight
    f0 = float(f_profile(np.zeros((1, g.d)))[0])
    D = float(eta_w @ f_profile(nodes[:, None, :] - nodes[None, :, :]) @ eta_w)
    if f0 < 0 or D < -1e-12 * max(1.0, abs(D)):
        raise PreconditionError("f is not of positive type on this grid")
    margins = []
    for conf in pts:
        pair = f_profile(conf[:, None, :] - conf[None, :, :])
        lhs = float(np.sum(np.triu(pair, 1)))
        f_eta = f_profile(conf[:, None, :] - nodes[None, :, :]) @ eta_w
        rhs = -f0 * K / 2 + float(f_eta.sum()) - 0.5 * D
        margins.append(lhs - rhs)
    margins = np.asarray(margins)
    return {
        "configurations": int(margins.size),
        "violations": int(np.sum(margins < 0)),
        "min_margin": float(margins.min()),
        "margins": margins,
    }


CSV_HEADER = ("N", "hbar", "energy_per_particle", "tf_gap", "exchange", "lt_ratio", "scf_iters", "converged")


@dataclass
class ConvergenceRow:
    N: int
    hbar: float
    energy_per_particle: float
    tf_gap: float
    exchange: float
    lt_ratio: float
    scf_iters: int
    converged: bool

    def as_tuple(self):
        return tuple(getattr(self, k) for k in CSV_HEADER)


def convergence_row(fields: ExternalFields, N: int, e_tf: float, coarse: ExternalFields | None = None, **solver) -> ConvergenceRow:
    scaling = Scaling(int(N), fields.d)
    res = rhf_minimize(fields, scaling, strict=False, **solver)
    energy, iters, ok = res.energy, res.iterations, res.converged
    if coarse is not None:
        # second-order scheme: remove the h^2 term with the half-resolution run
        rc = rhf_minimize(coarse, scaling, strict=False, **solver)
        energy = (4 * res.energy - rc.energy) / 3
        iters, ok = max(iters, rc.iterations), ok and rc.converged
    if not ok:
        log.warning("SCF for N=%d stopped without convergence (residual %.3e)", N, res.residual)
    op = build_magnetic_dirichlet(fields.grid, scaling.hbar)
    return ConvergenceRow(
        N=int(N),
        hbar=scaling.hbar,
        energy_per_particle=energy,
        tf_gap=energy - e_tf,
        exchange=hf_exchange(res.gamma, fields, N) / N,
        lt_ratio=lieb_thirring_ratio(res.gamma, op),
        scf_iters=iters,
        converged=ok,
    )


def coarsened(fields: ExternalFields) -> ExternalFields:
    """The same fields on the grid with half as many points per axis.

    ``V`` and ``A`` are cell averages; ``w`` is subsampled at the coarse offsets,
    which are a subset of the fine ones.
    """
    g = fields.grid
    if g.n < 4:
        raise ConfigurationError("grid too small to coarsen")
    cg = SpatialGrid(g.d, g.R, g.n // 2)

    def average(a, lead):
        out = np.asarray(a, dtype=float)
        for ax in range(lead, lead + g.d):
            out = out.reshape(out.shape[:ax] + (g.n // 2, 2) + out.shape[ax + 1 :]).mean(axis=ax + 1)
        return out

    w = fields.w_doubled[(slice(None, None, 2),) * g.d]
    return ExternalFields(cg, average(fields.V, 0), average(fields.A, 1), w)


def convergence_experiment(
    fields: ExternalFields,
    N_list,
    tf_reference: TFSolution | float,
    threads: int = 1,
    extrapolate: bool = False,
    **solver,
):
    """One row per ``N`` comparing the rHF energy per particle with ``e_TF(1)``.

    With ``extrapolate`` the energies are Richardson-extrapolated in the grid
    step using a second run on the half-resolution grid.  Rows come back
    ordered by ``N`` whatever order the workers finish in.
    """
    e_tf = tf_reference.energy if isinstance(tf_reference, TFSolution) else float(tf_reference)
    coarse = coarsened(fields) if extrapolate else None
    Ns = sorted(int(n) for n in N_list)

    def run(n):
        return convergence_row(fields, n, e_tf, coarse=coarse, **solver)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, Ns))
    else:
        rows = [run(n) for n in Ns]
    return rows


# ---------------------------------------------------------------------------
# exact diagonalisation for N <= 3


def _insert_sign(pair, rest):
    """Sign and sorted tuple of ``a+_{p1} a+_{p2} |rest>`` (zero sign if occupied)."""
    seq = list(pair) + list(rest)
    if len(set(seq)) < len(seq):
        return 0, None
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1) ** inv, tuple(sorted(seq))


@dataclass
class ExactResult:
    energy: float
    N: int
    basis_size: int
    dimension: int
    orbital_energies: np.ndarray

    @property
    def energy_per_particle(self) -> float:
        return self.energy / self.N


def exact_ground_state_small(
    fields: ExternalFields,
    scaling: Scaling,
    basis_size: int = 20,
    max_dimension: int = 10_000,
) -> ExactResult:
    """Lowest eigenvalue of ``H_N`` on antisymmetrised products of the lowest
    ``basis_size`` one-body modes of ``(-i hbar grad + A)^2 + V``.

    The determinant-space Hamiltonian is built with the pair decomposition
    ``<I|H_2|J> = sum_K s_I(K,P) s_J(K,Q) W_PQ`` over common (N-2)-subsets ``K``.
    """
    N = scaling.N
    if N not in (2, 3):
        raise PreconditionError("exact diagonalisation supports N = 2 or 3")
    if not 2 <= basis_size <= 40:
        raise ConfigurationError("basis_size must lie in [2, 40]")
    dim = comb(basis_size, N)
    if dim > max_dimension:
        raise CapacityError(f"determinant space of dimension {dim} exceeds {max_dimension}")
    op = one_body_operator(fields, scaling.hbar)
    modes = lowest_n_projector(op, basis_size)
    eps = modes.energies
    dets = list(itertools.combinations(range(basis_size), N))
    index = {det: i for i, det in enumerate(dets)}
    diag = np.array([eps[list(det)].sum() for det in dets])
    H = sp.diags(diag).tocsr()

    if not fields.w_is_zero:
        g = fields.grid
        M = basis_size
        phi = modes.orbitals.reshape(M, -1)
        pairs = list(itertools.combinations(range(M), 2))
        pidx = {p: i for i, p in enumerate(pairs)}
        # v[a,b,c,d] = (1/N) int conj(phi_a phi_b)(x,y) w(x-y) (phi_c phi_d)(x,y)
        prod = (phi.conj()[:, None, :] * phi[None, :, :]).reshape(M * M, -1)
        conv = fields.convolve(prod.reshape((M * M,) + g.shape)).reshape(M * M, -1)
        # V[(a,c),(b,d)] = int conj(phi_a) phi_c (w * conj(phi_b) phi_d)
        V = (prod @ conv.T) * g.weight / N
        v = V.reshape(M, M, M, M).transpose(0, 2, 1, 3)
        P = np.array(pairs)
        W = v[P[:, 0][:, None], P[:, 1][:, None], P[:, 0][None, :], P[:, 1][None, :]] - v[
            P[:, 0][:, None], P[:, 1][:, None], P[:, 1][None, :], P[:, 0][None, :]
        ]
        rows, cols, vals = [], [], []
        for K in itertools.combinations(range(M), N - 2):
            members = []
            for pair in pairs:
                s, det = _insert_sign(pair, K)
                if s:
                    members.append((index[det], pidx[pair], s))
            if not members:
                continue
            I = np.array([m[0] for m in members])
            Pp = np.array([m[1] for m in members])
            S = np.array([m[2] for m in members], dtype=float)
            block = S[:, None] * W[np.ix_(Pp, Pp)] * S[None, :]
            rows.append(np.repeat(I, I.size))
            cols.append(np.tile(I, I.size))
            vals.append(block.ravel())
        H2 = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )
        H = H + H2
    H = 0.5 * (H + H.getH())
    if dim <= 2000:
        energy = float(np.linalg.eigvalsh(H.toarray())[0])
    else:
        energy = float(spla.eigsh(H, k=1, which="SA", tol=1e-12)[0][0])
    return ExactResult(energy, N, basis_size, dim, eps)
