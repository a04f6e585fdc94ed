"""Bosonic (Gaussian) collision chain.

Covariance convention: vacuum = I/2, quadratures interleaved
(x1, p1, x2, p2, ...).  All states here are Gaussian, so the chain is just
a mean vector and a covariance matrix pushed through symplectic matrices:
mean -> S mean, cov -> S cov S^T.

Step structure, mode layout and snapshot timing mirror dv_model: mode 0 is
the system, modes 1..w the retained ancillae oldest to newest, and a
snapshot after step n still contains modes E_n and E_{n+1}.

The two collision types:
  * bs_sa(theta): beamsplitter coupling the system to ancilla E_n.
  * bs_aa(theta): beamsplitter coupling E_n to E_{n+1}, oriented so that
    E_n's freshly collided state feeds forward into the incoming ancilla
    (the transpose of bs_sa at the same angle).  At theta = pi/2 it moves
    E_n's state onto E_{n+1} completely: a transparent delay line.

Correlation erasure zeroes the covariance blocks between the system and
every environment mode; for Gaussian states with unchanged means this *is*
the product of the marginals, matching the DV erase semantics exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import check_physical_cov

__all__ = [
    "GaussianState",
    "CVParams",
    "CVChainState",
    "thermal_squeezed_cov",
    "bs_sa",
    "bs_aa",
    "embed_symplectic",
    "cv_chain_init",
    "cv_step",
    "cv_marginal",
    "cv_decorrelate",
    "cv_system",
]

_I2 = np.eye(2)


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    def validate(self, sym_tol=1e-12, phys_tol=1e-9):
        if self.mean.shape != (self.cov.shape[0],):
            raise ValueError("mean/cov size mismatch")
        if np.abs(self.cov - self.cov.T).max() > sym_tol:
            raise ValueError("covariance matrix not symmetric")
        check_physical_cov(self.cov, tol=phys_tol)


@dataclass(frozen=True)
class CVParams:
    theta_sa: float
    theta_aa: float
    nbar: float
    r: float
    ancilla_nbar: float = 0.0
    window: int = 2
    steps: int = 100
    full_history: bool = False

    def __post_init__(self):
        if not all(
            np.isfinite(v) for v in (self.theta_sa, self.theta_aa, self.r)
        ):
            raise ValueError("angles and squeezing must be finite")
        if self.nbar < 0.0 or self.ancilla_nbar < 0.0:
            raise ValueError("thermal occupation must be >= 0")
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


@dataclass(frozen=True)
class CVChainState:
    mean: np.ndarray
    cov: np.ndarray
    labels: tuple
    n: int = 0

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    @property
    def next_ancilla_label(self):
        return self.labels[-1] + 1


def thermal_squeezed_cov(nbar, r):
    """Single-mode thermal squeezed state, zero mean.

    cov = ((1 + 2 nbar)/2) diag(e^{2r}, e^{-2r}): x variance stretched by
    e^{2r}, p variance shrunk by the same factor, symplectic eigenvalue
    (1 + 2 nbar)/2 regardless of r (so det cov = ((1 + 2 nbar)/2)^2).
    """
    if nbar < 0.0:
        raise ValueError("thermal occupation must be >= 0")
    nu = 0.5 * (1.0 + 2.0 * nbar)
    cov = nu * np.diag([np.exp(2.0 * r), np.exp(-2.0 * r)])
    return GaussianState(mean=np.zeros(2), cov=cov)


def bs_sa(theta):
    """System-ancilla beamsplitter: x_S' = c x_S + s x_E, x_E' = -s x_S + c x_E."""
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * _I2, s * _I2], [-s * _I2, c * _I2]])


def bs_aa(theta):
    """Ancilla-ancilla beamsplitter, feed-forward orientation.

    bs_aa(theta) = bs_sa(theta).T = bs_sa(-theta): the just-collided ancilla's
    quadratures enter the incoming ancilla with weight sin(theta), so large
    theta hands the state down the chain (theta = pi/2 is a perfect relay).
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * _I2, -s * _I2], [s * _I2, c * _I2]])


def embed_symplectic(s4, i, j, n_modes):
    """Embed a two-mode symplectic block acting on modes (i, j)."""
    if i == j or not (0 <= i < n_modes and 0 <= j < n_modes):
        raise IndexError(f"invalid mode pair ({i}, {j})")
    full = np.eye(2 * n_modes)
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    full[np.ix_(idx, idx)] = s4
    return full


def cv_chain_init(params):
    n_anc = params.steps if params.full_history else params.window
    m = n_anc + 1
    cov = np.zeros((2 * m, 2 * m))
    cov[:2, :2] = thermal_squeezed_cov(params.nbar, params.r).cov
    anc = thermal_squeezed_cov(params.ancilla_nbar, 0.0).cov
    for i in range(1, m):
        cov[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = anc
    return CVChainState(
        mean=np.zeros(2 * m), cov=cov, labels=tuple(range(1, n_anc + 1)), n=0
    )


def _zero_cross(cov, a_modes):
    """Zero every covariance block between a_modes and the rest, in place."""
    m = cov.shape[0] // 2
    a_idx = sorted(sum(([2 * q, 2 * q + 1] for q in a_modes), []))
    b_idx = [i for i in range(2 * m) if i not in a_idx]
    cov[np.ix_(a_idx, b_idx)] = 0.0
    cov[np.ix_(b_idx, a_idx)] = 0.0


def cv_step(state, params, erase=False):
    n = state.n + 1
    if n > params.steps:
        raise ValueError(f"run is over ({params.steps} steps)")
    mean, cov, labels = state.mean, state.cov, list(state.labels)
    m = 1 + len(labels)

    if not params.full_history and labels[-1] < n + 1:
        keep = [0] + list(range(2, m))
        idx = sorted(sum(([2 * q, 2 * q + 1] for q in keep), []))
        red = cov[np.ix_(idx, idx)]
        cov = np.zeros((2 * m, 2 * m))
        cov[: 2 * (m - 1), : 2 * (m - 1)] = red
        cov[2 * (m - 1) :, 2 * (m - 1) :] = thermal_squeezed_cov(
            params.ancilla_nbar, 0.0
        ).cov
        mean = np.concatenate([mean[idx], np.zeros(2)])
        labels = labels[1:] + [n + 1]

    i_sa = 1 + labels.index(n)
    s_full = embed_symplectic(bs_sa(params.theta_sa), 0, i_sa, m)
    cov = s_full @ cov @ s_full.T
    mean = s_full @ mean

    if erase:
        _zero_cross(cov, [0])

    if (n + 1) in labels:
        i_aa = 1 + labels.index(n + 1)
        s_full = embed_symplectic(bs_aa(params.theta_aa), i_sa, i_aa, m)
        cov = s_full @ cov @ s_full.T
        mean = s_full @ mean

    check_physical_cov(cov)
    return CVChainState(mean=mean, cov=cov, labels=tuple(labels), n=n)


def cv_marginal(state, keep):
    """Marginal over the given modes (0 = system); Gaussian tracing is exact."""
    keep = sorted(set(keep))
    m = state.cov.shape[0] // 2
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[-1] >= m or keep[0] < 0:
        raise IndexError(f"mode out of range: {keep}")
    idx = sorted(sum(([2 * q, 2 * q + 1] for q in keep), []))
    return GaussianState(mean=state.mean[idx], cov=state.cov[np.ix_(idx, idx)])


def cv_decorrelate(state, set_a, set_b=None):
    """Drop all correlations between the two mode sets (product of marginals)."""
    m = state.cov.shape[0] // 2
    set_a = sorted(set(set_a))
    rest = [q for q in range(m) if q not in set_a]
    if set_b is None:
        set_b = rest
    if sorted(set(set_b)) != rest:
        raise ValueError("mode sets must partition the modes")
    cov = state.cov.copy()
    _zero_cross(cov, set_a)
    return GaussianState(mean=state.mean.copy(), cov=cov)


def cv_system(state):
    return cv_marginal(state, [0])
