"""Small dense complex matrix algebra used throughout the package.

Everything here operates on plain ndarrays. Subsystem ordering convention,
used everywhere in this package: index 0 is the system, indices 1..w are the
ancilla window ordered oldest to newest.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "NumericalFailure",
    "kron",
    "partial_trace",
    "hermitian_eig",
    "psd_sqrt",
    "embed_two_site",
    "apply_two_site",
    "expm_antihermitian",
]


class NumericalFailure(RuntimeError):
    """A matrix violated a numerical precondition badly enough to signal a bug."""


def kron(a, b):
    return np.kron(a, b)


def partial_trace(rho, dims, drop):
    """Trace out the subsystems listed in `drop`.

    rho is a (prod(dims) x prod(dims)) matrix over the ordered factors `dims`.
    """
    dims = list(dims)
    m = len(dims)
    drop = sorted(set(drop))
    if any(q < 0 or q >= m for q in drop):
        raise IndexError(f"subsystem index out of range: {drop}")
    t = rho.reshape(tuple(dims) * 2)
    cur = m
    for q in reversed(drop):
        t = np.trace(t, axis1=q, axis2=cur + q)
        cur -= 1
    d = int(np.prod([dims[q] for q in range(m) if q not in drop], dtype=np.int64))
    return t.reshape(d, d)


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix (input symmetrized first).

    Returns (eigenvalues ascending, eigenvector columns).
    """
    h = 0.5 * (m + m.conj().T)
    return np.linalg.eigh(h)


def psd_sqrt(m, clamp=-1e-10):
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [clamp, 0) are treated as rounding noise and clamped to 0;
    anything below `clamp` raises, because that is a genuinely indefinite input.
    """
    w, v = hermitian_eig(m)
    if w[0] < clamp:
        raise NumericalFailure(f"matrix not PSD: min eigenvalue {w[0]:.3e}")
    w = np.where(w < 0.0, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def embed_two_site(u, dims, sites):
    """Embed a two-site unitary acting on subsystems (i, j) into the full space.

    u is (d*d x d*d) ordered as site_i (x) site_j.
    """
    i, j = sites
    if i == j:
        raise ValueError("sites must differ")
    dims = list(dims)
    d = dims[i]
    if dims[j] != d or u.shape != (d * d, d * d):
        raise ValueError("two-site unitary dimension mismatch")
    m = len(dims)
    total = int(np.prod(dims))
    # act with u on basis-index pairs (a_i, a_j), identity elsewhere
    ut = u.reshape(d, d, d, d)
    full = np.zeros((total, total), dtype=complex)
    rest = [q for q in range(m) if q not in (i, j)]
    # enumerate basis of everything else once; cheap at the sizes used here
    rest_dims = [dims[q] for q in rest]
    for rest_idx in np.ndindex(*rest_dims) if rest_dims else [()]:
        for ai in range(d):
            for aj in range(d):
                col = _flat_index(dims, rest, rest_idx, i, ai, j, aj)
                for bi in range(d):
                    for bj in range(d):
                        row = _flat_index(dims, rest, rest_idx, i, bi, j, bj)
                        full[row, col] += ut[bi, bj, ai, aj]
    return full


def _flat_index(dims, rest, rest_idx, i, ai, j, aj):
    idx = [0] * len(dims)
    for q, a in zip(rest, rest_idx):
        idx[q] = a
    idx[i] = ai
    idx[j] = aj
    flat = 0
    for q, d in enumerate(dims):
        flat = flat * d + idx[q]
    return flat


def apply_two_site(rho, u, dims, sites):
    """Conjugate rho by the two-site unitary u on subsystems (i, j).

    Equivalent to E @ rho @ E.conj().T with E = embed_two_site(u, dims, sites),
    but done by tensor contraction so the full embedded matrix never exists.
    """
    i, j = sites
    dims = tuple(dims)
    m = len(dims)
    d = dims[i]
    t = rho.reshape(dims * 2)
    uu = u.reshape(d, d, d, d)
    # left action on ket indices (i, j)
    t = np.tensordot(uu, t, axes=([2, 3], [i, j]))
    t = np.moveaxis(t, [0, 1], [i, j])
    # right action on bra indices
    t = np.tensordot(t, uu.conj(), axes=([m + i, m + j], [2, 3]))
    t = np.moveaxis(t, [2 * m - 2, 2 * m - 1], [m + i, m + j])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def expm_antihermitian(h, t=1.0):
    """exp(-i t h) for Hermitian h, via eigendecomposition. Result is unitary."""
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T
