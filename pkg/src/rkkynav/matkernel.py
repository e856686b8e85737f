"""Dense complex matrix primitives.

Everything here works on small (<= 64) dense matrices. Matrix functions are
evaluated by spectral calculus on Hermitian inputs only.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import NonHermitian, NonSquare

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEig:
    """Eigen-decomposition ``m = V diag(eigenvalues) V^dagger``, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermiticity_error(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> HermitianEig:
    """Eigen-decompose a Hermitian matrix.

    The tolerance is scaled by ``max(1, max|m|)`` so large but exactly built
    operators are not rejected for round-off.
    """
    a = as_matrix(m)
    err = hermiticity_error(a)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if err > tol * scale:
        raise NonHermitian(f"max|m - m^dagger| = {err:.3e} exceeds {tol:.1e}")
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    return HermitianEig(w, v)


def unitary_from_eig(e: HermitianEig, phase: float) -> np.ndarray:
    """Return ``V exp(-i phase diag(lambda)) V^dagger``."""
    if not np.isfinite(phase):
        raise ValueError("phase must be finite")
    v = e.eigenvectors
    return (v * np.exp(-1j * phase * e.eigenvalues)) @ v.conj().T


def unitaries_from_eig(e: HermitianEig, phases) -> np.ndarray:
    """Vectorised :func:`unitary_from_eig`; returns shape ``(len(phases), d, d)``."""
    phases = np.asarray(phases, dtype=float)
    v = e.eigenvectors
    ph = np.exp(-1j * np.multiply.outer(phases, e.eigenvalues))
    return np.einsum("ij,nj,kj->nik", v, ph, v.conj(), optimize=True)


def expm_hermitian(h, t: float = 1.0) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h``."""
    return unitary_from_eig(hermitian_eig(h), t)


def expm_hermitian_batch(hs) -> np.ndarray:
    """``exp(-i h)`` for a stack of Hermitian matrices of shape ``(n, d, d)``."""
    hs = np.asarray(hs, dtype=complex)
    hs = 0.5 * (hs + np.conj(np.swapaxes(hs, -1, -2)))
    w, v = np.linalg.eigh(hs)
    return np.einsum("nij,nj,nkj->nik", v, np.exp(-1j * w), v.conj(), optimize=True)


def sqrtm_psd(m, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues down to ``-tol`` are clipped to zero.
    """
    e = hermitian_eig(m, tol=max(tol, HERMITIAN_TOL))
    if e.eigenvalues.min() < -tol:
        raise ValueError(f"matrix is not PSD (min eigenvalue {e.eigenvalues.min():.3e})")
    w = np.sqrt(np.clip(e.eigenvalues, 0.0, None))
    v = e.eigenvectors
    return (v * w) @ v.conj().T


def kron(*mats) -> np.ndarray:
    """Tensor product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def block_structure(*mats, tol: float = 0.0) -> list[np.ndarray]:
    """Index sets of the common diagonal blocks of ``mats`` in the current basis.

    Two basis states share a block when any matrix couples them; the blocks
    are the connected components of that coupling graph.
    """
    n = np.asarray(mats[0]).shape[0]
    adj = np.zeros((n, n), dtype=bool)
    for m in mats:
        adj |= np.abs(np.asarray(m)) > tol
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.nonzero(adj[i] | adj[:, i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        blocks.append(np.array(sorted(comp)))
    return blocks


def expm_hermitian_blocked(hs, blocks) -> np.ndarray:
    """:func:`expm_hermitian_batch` for generators sharing a block structure."""
    hs = np.asarray(hs, dtype=complex)
    if len(blocks) == 1:
        return expm_hermitian_batch(hs)
    out = np.zeros_like(hs)
    for idx in blocks:
        ix = np.ix_(idx, idx)
        if len(idx) == 1:
            out[(slice(None),) + ix] = np.exp(-1j * hs[(slice(None),) + ix].real)
        else:
            out[(slice(None),) + ix] = expm_hermitian_batch(hs[(slice(None),) + ix])
    return out
