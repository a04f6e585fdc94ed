"""Distinguishability measures.

Density-matrix side: trace distance, Uhlmann fidelity, Bures distance.
Gaussian side: multimode fidelity and Bures distance on covariance matrices.

Gaussian convention (shared by the whole package): vacuum covariance = I/2,
quadratures interleaved (x1, p1, x2, p2, ...), symplectic form built from
2x2 blocks [[0, 1], [-1, 0]].

Identical array objects short-circuit to the exact value (distance 0,
fidelity 1). The collision engines keep stationary branches bit-identical,
so "this state never changed" propagates into exact zeros in the reports
instead of accumulating eigensolver noise.
"""

from __future__ import annotations

import numpy as np

from .linalg import NumericalFailure, hermitian_eig, psd_sqrt

__all__ = [
    "trace_distance",
    "uhlmann_fidelity",
    "qubit_fidelity",
    "bures_from_fidelity",
    "bures_distance",
    "symplectic_form",
    "check_physical_cov",
    "gaussian_fidelity",
    "gaussian_bures",
]

# fidelity overshoot beyond [0,1] larger than this is a bug, not rounding
_CLIP_TOL = 1e-8


def _same(a, b):
    return a is b or (a.shape == b.shape and (a == b).all())


def _clip_unit(value, what):
    if value > 1.0 + _CLIP_TOL or value < -_CLIP_TOL:
        raise NumericalFailure(f"{what} = {value!r} outside [0,1] beyond tolerance")
    return min(max(value, 0.0), 1.0)


def trace_distance(rho, sigma):
    """D(rho, sigma) = half the trace norm of the difference."""
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    if _same(rho, sigma):
        return 0.0
    w, _ = hermitian_eig(rho - sigma)
    return _clip_unit(0.5 * float(np.abs(w).sum()), "trace distance")


def uhlmann_fidelity(rho, sigma):
    """F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    if _same(rho, sigma):
        return 1.0
    s = psd_sqrt(rho)
    w, _ = hermitian_eig(s @ sigma @ s)
    w = np.where(w < 0.0, 0.0, w)
    return _clip_unit(float(np.sqrt(w).sum()), "fidelity")


def qubit_fidelity(rho, sigma):
    """Closed form for qubits: sqrt(Tr(rho sigma) + 2 sqrt(det rho det sigma))."""
    t = np.trace(rho @ sigma).real
    d = np.linalg.det(rho).real * np.linalg.det(sigma).real
    d = max(d, 0.0)
    return _clip_unit(float(np.sqrt(max(t + 2.0 * np.sqrt(d), 0.0))), "qubit fidelity")


def bures_from_fidelity(f):
    """B = sqrt(2 (1 - F)); tiny negative 1-F from rounding is clipped."""
    gap = max(1.0 - f, 0.0)
    return float(np.sqrt(2.0 * gap))


def bures_distance(rho, sigma):
    return bures_from_fidelity(uhlmann_fidelity(rho, sigma))


def symplectic_form(n_modes):
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), j)


def check_physical_cov(cov, tol=1e-9):
    """Uncertainty relation: cov + (i/2) Omega must be PSD (within tol)."""
    n = cov.shape[0] // 2
    if cov.shape != (2 * n, 2 * n):
        raise ValueError("covariance matrix must be 2n x 2n")
    if not np.isfinite(cov).all():
        raise NumericalFailure("covariance matrix has non-finite entries")
    m = cov + 0.5j * symplectic_form(n)
    w = np.linalg.eigvalsh(m)
    if w[0] < -tol:
        raise NumericalFailure(f"unphysical covariance matrix: min eig {w[0]:.3e}")


def gaussian_fidelity(cov1, cov2, mean1=None, mean2=None):
    """Multimode Gaussian fidelity from covariance matrices (and means).

    Closed form: with V_aux = Omega^T (c1+c2)^{-1} (Omega/4 + c2 Omega c1),
    F^4 = det(V_aux) * prod_i [2 (1 + sqrt(1 - 1/(4 nu_i^2)))]^2 / det(c1+c2),
    nu_i the positive eigenvalues of i sqrt(V_aux) Omega sqrt(V_aux)
    (equivalently the symplectic spectrum of V_aux), times the usual
    mean-difference exponential. Zero-mean inputs skip the mean factor.

    For modes with nu == 1/2 the bracket is analytically 2; the eigensolver
    returns nu = 1/2 + O(eps) and the sqrt amplifies that to ~1e-8, so values
    of 1 - 1/(4 nu^2) below 1e-12 are snapped to 0 before the sqrt.
    """
    n = cov1.shape[0] // 2
    if cov1.shape != cov2.shape:
        raise ValueError("mode-count mismatch")
    check_physical_cov(cov1)
    check_physical_cov(cov2)

    same_mean = _mean_factor_is_one(mean1, mean2)
    if same_mean and _same(cov1, cov2):
        return 1.0

    omega = symplectic_form(n)
    csum = cov1 + cov2
    det_csum = np.linalg.det(csum)
    if not np.isfinite(det_csum) or det_csum <= 0.0:
        raise NumericalFailure("singular covariance sum")
    si = np.linalg.inv(csum)
    vaux = omega.T @ si @ (0.25 * omega + cov2 @ omega @ cov1)

    # vaux is generally not symmetric, so its symplectic spectrum comes from
    # a plain eigendecomposition: eig(i Omega vaux) = {+nu_i, -nu_i}
    lam = np.linalg.eigvals(1j * (omega @ vaux))
    if np.abs(lam.imag).max() > 1e-6 * max(np.abs(lam.real).max(), 1.0):
        raise NumericalFailure("auxiliary matrix has no real symplectic spectrum")
    nu = lam.real[lam.real > 0.0]

    x = 1.0 - 1.0 / (4.0 * nu**2)
    x = np.where(x < 1e-12, 0.0, x)
    bracket = np.prod(2.0 * (1.0 + np.sqrt(x)))
    f4 = np.linalg.det(vaux).real * bracket**2 / det_csum
    f = _clip_unit(float(max(f4, 0.0) ** 0.25), "gaussian fidelity")

    if not same_mean:
        delta = np.asarray(mean1, dtype=float) - np.asarray(mean2, dtype=float)
        f *= float(np.exp(-0.25 * delta @ si @ delta))
    return f


def _mean_factor_is_one(mean1, mean2):
    if mean1 is None and mean2 is None:
        return True
    m1 = np.zeros(0) if mean1 is None else np.asarray(mean1)
    m2 = np.zeros(0) if mean2 is None else np.asarray(mean2)
    if mean1 is None:
        m1 = np.zeros_like(m2)
    if mean2 is None:
        m2 = np.zeros_like(m1)
    return bool((m1 == m2).all())


def gaussian_bures(cov1, cov2, mean1=None, mean2=None):
    return bures_from_fidelity(gaussian_fidelity(cov1, cov2, mean1, mean2))
