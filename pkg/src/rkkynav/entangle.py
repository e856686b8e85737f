"""Entanglement metrics of the two-qubit reduced state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimension
from .states import PAULI_Y, DensityMatrix

SIGMA_YY = np.kron(PAULI_Y, PAULI_Y)

# |C_E| at or below this is treated as lying on the boundary
BOUNDARY_TOL = 1e-8
# eigenvalues of rho at round-off level are taken as exact zeros
ZERO_EIG = 1e-14
NEG_EIG_TOL = 1e-8
PPT_TOL = 1e-10


@dataclass(frozen=True)
class ConcurrenceResult:
    c_extended: float
    kappas: tuple

    @property
    def concurrence(self) -> float:
        """Standard (Wootters) concurrence, clamped at zero."""
        return max(0.0, self.c_extended)


def _two_qubit(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        if rho.dims != (2, 2):
            raise BadDimension(f"expected a two-qubit state, got dims {rho.dims}")
        return rho.data
    a = np.asarray(rho, dtype=complex)
    if a.shape[-2:] != (4, 4):
        raise BadDimension(f"expected 4x4 matrices, got shape {a.shape}")
    return a


def spin_flip(rho) -> np.ndarray:
    """``sigma_y (x) sigma_y  rho*  sigma_y (x) sigma_y``; broadcasts over leading axes."""
    return SIGMA_YY @ np.conj(rho) @ SIGMA_YY


def kappas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho rho'``, sorted descending.

    Works on a single 4x4 matrix or a stack ``(..., 4, 4)``. With
    ``rho = A A^dagger`` and ``rho' = B B^dagger`` (``B = sigma_yy A*``) the
    kappas are the singular values of ``A^dagger B``, which avoids taking
    square roots of round-off sized eigenvalues of the non-Hermitian product.
    Eigenvalues of ``rho`` below ``ZERO_EIG`` are treated as exact zeros.
    """
    a = _two_qubit(rho)
    lam, v = np.linalg.eigh(0.5 * (a + np.conj(np.swapaxes(a, -1, -2))))
    if np.any(lam < -NEG_EIG_TOL):
        raise ValueError("input has a negative eigenvalue; it is not a state")
    lam = np.where(lam > ZERO_EIG, lam, 0.0)
    fa = v * np.sqrt(lam)[..., None, :]
    fb = SIGMA_YY @ np.conj(fa)
    return np.linalg.svd(np.conj(np.swapaxes(fa, -1, -2)) @ fb, compute_uv=False)


def extended_concurrence(rho) -> ConcurrenceResult:
    """Concurrence without the clamp at zero: ``2 kappa_max - sum(kappa)``."""
    k = kappas(rho)
    if k.ndim != 1:
        raise BadDimension("extended_concurrence takes one state; use concurrence_values")
    return ConcurrenceResult(float(2 * k[0] - k.sum()), tuple(float(x) for x in k))


def concurrence_values(rhos) -> np.ndarray:
    """Extended concurrence for a stack of 4x4 states."""
    k = kappas(rhos)
    return 2 * k[..., 0] - k.sum(axis=-1)


def partial_transpose(rho, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a two-qubit matrix over qubit ``subsystem`` (0 = A, 1 = B)."""
    a = _two_qubit(rho).reshape(np.shape(rho)[:-2] + (2, 2, 2, 2))
    if subsystem == 1:
        t = np.swapaxes(a, -3, -1)
    elif subsystem == 0:
        t = np.swapaxes(a, -4, -2)
    else:
        raise BadDimension("subsystem must be 0 or 1")
    return t.reshape(np.shape(rho)[:-2] + (4, 4))


def min_pt_eigenvalue(rho) -> float:
    pt = partial_transpose(rho)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T)).min())


def negativity(rho) -> float:
    """Sum of the magnitudes of negative partial-transpose eigenvalues."""
    pt = partial_transpose(rho)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-ev[ev < 0].sum())


def ppt_entangled(rho) -> bool:
    """Peres-Horodecki test: True when the partial transpose has a negative eigenvalue."""
    return min_pt_eigenvalue(rho) < -PPT_TOL


def purity(rho) -> float:
    a = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.real(np.einsum("...ij,...ji->...", a, a)))
