"""Brute-force number-basis verification for the Gaussian layer.

Everything the covariance-matrix code claims should be reproducible by
truncating the oscillator Hilbert space at `cutoff` photons and doing dense
(or factored dense) linear algebra. This module builds those truncated
objects: thermal squeezed density matrices, beamsplitter unitaries, and an
Uhlmann fidelity on them.

Conventions match the Gaussian side: hbar = 1, x = (a + a^dag)/sqrt(2),
p = i (a^dag - a)/sqrt(2), vacuum covariance I/2; the squeeze unitary is
exp((r/2)(a^dag^2 - a^2)) so positive r stretches x, and the beamsplitter is
exp(theta (a^dag b - a b^dag)), which acts on quadratures exactly like
bs_sa(theta).

Dense two-mode work at cutoff 60 means 3600-dimensional matrices, which this
box cannot eigendecompose in sensible time. Two-mode states therefore come
out *factored*: eigenvalues are the (kron'd, tail-trimmed) thermal weights
and eigenvectors are columns of exactly unitary squeeze/beamsplitter
factors, so F(rho, sigma) = || sqrt(L1) U1^dag U2 sqrt(L2) ||_1 reduces to
an SVD of a rank x rank matrix. The factored and dense routes are checked
against each other at small cutoff in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import expm_antihermitian
from .metrics import uhlmann_fidelity

__all__ = [
    "FockConfig",
    "FockState",
    "destroy",
    "thermal_probs",
    "squeeze_unitary",
    "fock_thermal_squeezed",
    "beamsplitter_blocks",
    "fock_beamsplitter",
    "fock_two_mode_state",
    "oracle_fidelity",
    "fock_moments",
]

# kron'd thermal eigenvalues below this are dropped from factored states;
# the discarded mass is ~1e-19 and shifts fidelities far below the 1e-6
# tolerances this oracle is used at
_PROB_FLOOR = 1e-22


@dataclass(frozen=True)
class FockConfig:
    cutoff: int = 60
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValueError("cutoff must be >= 2")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError("tolerance must be in (0, 1)")


@dataclass(frozen=True)
class FockState:
    """Eigendecomposition rho = basis @ diag(probs) @ basis^dag.

    `basis` columns are orthonormal; `probs` sum to `captured` <= 1 (the
    thermal tail beyond the probability floor is dropped, not renormalized,
    so the loss stays visible).
    """

    probs: np.ndarray
    basis: np.ndarray
    captured: float

    @property
    def dim(self):
        return self.basis.shape[0]

    def density(self):
        scaled = self.basis * (self.probs / self.captured)
        return scaled @ self.basis.conj().T


def destroy(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)


def thermal_probs(nbar, cutoff):
    if nbar < 0.0:
        raise ValueError("thermal occupation must be >= 0")
    if nbar == 0.0:
        p = np.zeros(cutoff)
        p[0] = 1.0
        return p
    ratio = nbar / (nbar + 1.0)
    return (1.0 / (nbar + 1.0)) * ratio ** np.arange(cutoff)


@lru_cache(maxsize=None)
def squeeze_unitary(r, cutoff):
    a = destroy(cutoff)
    ad = a.conj().T
    gen = ad @ ad - a @ a
    return expm_antihermitian(0.5j * r * gen, 1.0)


def fock_thermal_squeezed(nbar, r, cutoff, tolerance=1e-7):
    """Truncated S(r) rho_thermal(nbar) S(r)^dag, unit-normalized."""
    p = thermal_probs(nbar, cutoff)
    captured = p.sum()
    if captured < 1.0 - tolerance:
        raise ValueError(
            f"cutoff {cutoff} captures only {captured:.12f} of the thermal state"
        )
    u = squeeze_unitary(r, cutoff)
    rho = (u * p) @ u.conj().T
    return rho / np.trace(rho).real


@lru_cache(maxsize=None)
def beamsplitter_blocks(theta, cutoff):
    """exp(theta (a^dag b - a b^dag)) assembled per total photon number.

    The generator conserves n_a + n_b, so the unitary is block diagonal over
    N = n_a + n_b; each block is an exact matrix exponential of a small skew
    matrix. Returns ((flat_indices, block_unitary), ...) with flat index
    n_a * cutoff + n_b.
    """
    blocks = []
    for total in range(2 * cutoff - 1):
        lo = max(0, total - (cutoff - 1))
        hi = min(total, cutoff - 1)
        ns = np.arange(lo, hi + 1)
        size = ns.size
        gen = np.zeros((size, size))
        for i, n in enumerate(ns[:-1]):
            # <n+1, m-1| a^dag b |n, m> with m = total - n
            amp = np.sqrt((n + 1.0) * (total - n))
            gen[i + 1, i] = amp
            gen[i, i + 1] = -amp
        flat = ns * cutoff + (total - ns)
        blocks.append((flat, expm_antihermitian(1j * theta * gen, 1.0)))
    return tuple(blocks)


def fock_beamsplitter(theta, cutoff):
    dim = cutoff * cutoff
    u = np.zeros((dim, dim), dtype=complex)
    for flat, block in beamsplitter_blocks(theta, cutoff):
        u[np.ix_(flat, flat)] = block
    return u


def _apply_beamsplitter(theta, cutoff, mat):
    out = np.empty_like(mat)
    for flat, block in beamsplitter_blocks(theta, cutoff):
        out[flat, :] = block @ mat[flat, :]
    return out


def fock_two_mode_state(nbar_a, r_a, nbar_b, r_b, theta, cutoff, tolerance=1e-7):
    """Factored B(theta) (S(r_a) th(nbar_a) S^dag (x) S(r_b) th(nbar_b) S^dag) B^dag."""
    pa = thermal_probs(nbar_a, cutoff)
    pb = thermal_probs(nbar_b, cutoff)
    if pa.sum() < 1.0 - tolerance or pb.sum() < 1.0 - tolerance:
        raise ValueError(f"cutoff {cutoff} captures too little of the thermal inputs")
    probs = np.outer(pa, pb).ravel()
    keep = np.nonzero(probs > _PROB_FLOOR)[0]
    order = keep[np.argsort(-probs[keep], kind="stable")]
    ii, jj = np.divmod(order, cutoff)
    ua = squeeze_unitary(r_a, cutoff)
    ub = squeeze_unitary(r_b, cutoff)
    cols = np.einsum("ar,br->abr", ua[:, ii], ub[:, jj]).reshape(cutoff * cutoff, -1)
    basis = _apply_beamsplitter(theta, cutoff, cols)
    return FockState(probs=probs[order], basis=basis, captured=float(probs[order].sum()))


def oracle_fidelity(state1, state2, cfg=None):
    """Uhlmann fidelity of truncated states (dense matrices or FockState)."""
    cfg = cfg or FockConfig()
    if isinstance(state1, np.ndarray) and isinstance(state2, np.ndarray):
        for rho in (state1, state2):
            tr = np.trace(rho).real
            if tr < 1.0 - cfg.tolerance:
                raise ValueError(f"truncated trace {tr:.12f} below tolerance")
        return uhlmann_fidelity(state1 / np.trace(state1).real,
                                state2 / np.trace(state2).real)
    if isinstance(state1, FockState) and isinstance(state2, FockState):
        for st in (state1, state2):
            if st.captured < 1.0 - cfg.tolerance:
                raise ValueError(f"captured mass {st.captured:.12f} below tolerance")
        cross = state1.basis.conj().T @ state2.basis
        cross *= np.sqrt(state1.probs / state1.captured)[:, None]
        cross *= np.sqrt(state2.probs / state2.captured)[None, :]
        return float(np.linalg.svd(cross, compute_uv=False).sum())
    raise TypeError("states must both be dense arrays or both FockState")


def fock_moments(rho, n_modes, cutoff):
    """Quadrature mean vector and covariance matrix of a truncated state."""
    a = destroy(cutoff)
    ad = a.conj().T
    x1 = (a + ad) / np.sqrt(2.0)
    p1 = 1j * (ad - a) / np.sqrt(2.0)
    eye = np.eye(cutoff, dtype=complex)
    quads = []
    for mode in range(n_modes):
        for op in (x1, p1):
            factors = [eye] * n_modes
            factors[mode] = op
            full = factors[0]
            for f in factors[1:]:
                full = np.kron(full, f)
            quads.append(full)
    mean = np.array([np.trace(rho @ q).real for q in quads])
    k = len(quads)
    q_rho = [q @ rho for q in quads]
    cov = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            # tr(AB) as an elementwise sum; symmetrize Q_i Q_j against Q_j Q_i
            t_ij = np.sum(quads[i] * q_rho[j].T)
            t_ji = np.sum(quads[j] * q_rho[i].T)
            cov[i, j] = cov[j, i] = 0.5 * (t_ij + t_ji).real - mean[i] * mean[j]
    return mean, cov
