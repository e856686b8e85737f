"""Bell basis, weighting table, qudit spin operators and initial states.

The Hilbert space is always ordered A (x) B (x) C: qubit A, qubit B and the
central qudit C of dimension ``d = 2 S + 1``. Qubit basis is (up, down) and
the qudit basis runs over spin-z eigenstates in descending ``m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (BadSubsystem, EpsilonOutOfRange, UnsupportedSpin,
                     WeightCountMismatch)

SQRT_HALF = np.sqrt(0.5)

BELL_NAMES = ("alpha+", "alpha-", "beta+", "beta-")

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

SUPPORTED_SPINS = (0.5, 1.0, 1.5)

# Weight patterns as functions of epsilon, ordered (alpha+, alpha-, beta+, beta-).
_P2 = lambda e: (1 + e) / 2  # noqa: E731
_M2 = lambda e: (1 - e) / 2  # noqa: E731
_M4 = lambda e: (1 - e) / 4  # noqa: E731
_M6 = lambda e: (1 - e) / 6  # noqa: E731
_Z = lambda e: 0.0  # noqa: E731

WEIGHT_TABLE = {
    "W1": (_P2, _M2, _Z, _Z),
    "W2": (_P2, _Z, _M2, _Z),
    "W3": (_P2, _Z, _Z, _M2),
    "W4": (_Z, _P2, _M2, _Z),
    "W5": (_Z, _P2, _Z, _M2),
    "W6": (_Z, _Z, _P2, _M2),
    "W7": (_P2, _M4, _M4, _Z),
    "W8": (_Z, _P2, _M4, _M4),
    "W9": (_M4, _Z, _P2, _M4),
    "W10": (_M4, _M4, _Z, _P2),
    "W11": (_P2, _M6, _M6, _M6),
    "W12": (_M6, _P2, _M6, _M6),
    "W13": (_M6, _M6, _P2, _M6),
    "W14": (_M6, _M6, _M6, _P2),
}
LABELS = tuple(WEIGHT_TABLE)


def normalize_label(label) -> str:
    """Accept ``"W7"``, ``"w7"`` or ``7``."""
    if isinstance(label, (int, np.integer)):
        key = f"W{int(label)}"
    else:
        key = str(label).strip().upper()
        if not key.startswith("W"):
            key = "W" + key
    if key not in WEIGHT_TABLE:
        raise KeyError(f"unknown weighting label {label!r}")
    return key


def label_index(label) -> int:
    return int(normalize_label(label)[1:])


def bell_count(label) -> int:
    """Number of Bell states with nonzero weight at generic epsilon."""
    i = label_index(label)
    return 2 if i <= 6 else (3 if i <= 10 else 4)


def grouped_qudit_spin(label) -> float:
    """Qudit spin assigned to a weighting group: W1-6 -> 1/2, W7-10 -> 1, W11-14 -> 3/2."""
    return {2: 0.5, 3: 1.0, 4: 1.5}[bell_count(label)]


def qudit_spin_for(label, kind: str, mixed_policy: str = "qubit") -> float:
    """Qudit spin used for a (label, state kind) pair.

    Pure states always follow the group assignment. Mixed states use a
    spin-1/2 qudit under the default ``"qubit"`` policy; ``"grouped"`` makes
    them follow the pure-state assignment instead.
    """
    if kind == "pure" or mixed_policy == "grouped":
        return grouped_qudit_spin(label)
    if mixed_policy == "qubit":
        return 0.5
    raise ValueError(f"unknown mixed-state qudit policy {mixed_policy!r}")


def bell_states() -> np.ndarray:
    """Rows are |alpha+>, |alpha->, |beta+>, |beta-> in the (uu, ud, du, dd) basis."""
    r = SQRT_HALF
    return np.array([
        [r, 0, 0, r],
        [r, 0, 0, -r],
        [0, r, r, 0],
        [0, r, -r, 0],
    ], dtype=complex)


@dataclass(frozen=True)
class BellWeighting:
    label: str
    epsilon: float
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,):
            raise ValueError("a Bell weighting has exactly four entries")
        if np.any(w < -1e-15) or np.any(w > 1 + 1e-15):
            raise EpsilonOutOfRange(f"weights {tuple(w)} leave [0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def nonzero(self) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w != 0.0]


def weighting(label, epsilon: float) -> BellWeighting:
    """Bell weighting for a table row at entanglement switch parameter ``epsilon``."""
    key = normalize_label(label)
    eps = float(epsilon)
    if not np.isfinite(eps) or eps < -1.0 or eps > 1.0:
        raise EpsilonOutOfRange(f"epsilon={epsilon!r} must lie in [-1, 1]")
    w = tuple(float(f(eps)) for f in WEIGHT_TABLE[key])
    return BellWeighting(key, eps, w)


def custom_weighting(weights: Sequence[float], label: str = "custom") -> BellWeighting:
    return BellWeighting(label, float("nan"), tuple(float(x) for x in weights))


def spin_matrices(spin) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular momentum matrices (S_x, S_y, S_z) in the descending-m basis."""
    s = float(spin)
    if not any(abs(s - v) < 1e-12 for v in SUPPORTED_SPINS):
        raise UnsupportedSpin(f"qudit spin {spin!r} not in {{1/2, 1, 3/2}}")
    d = int(round(2 * s + 1))
    m = s - np.arange(d)
    # <m+1|S+|m> = sqrt(s(s+1) - m(m+1)); with descending m the raising
    # operator sits on the superdiagonal
    sp = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sx = 0.5 * (sp + sp.conj().T)
    sy = -0.5j * (sp - sp.conj().T)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


@dataclass(frozen=True)
class SystemConfig:
    """Qudit spin, exchange anisotropy and exchange ratio.

    ``eta`` holds the per-component coupling ``J_k / J0`` of qubit A. The
    default ``(1, 1, 1)`` is the isotropic Heisenberg coupling
    ``J0 sigma . S``. Qubit B uses ``eta / gamma``.
    """

    qudit_spin: float = 0.5
    eta: tuple = (1.0, 1.0, 1.0)
    gamma: float = 1.0
    J0: float = -1.0

    def __post_init__(self):
        spin_matrices(self.qudit_spin)
        eta = np.asarray(self.eta, dtype=float)
        if eta.shape != (3,) or not np.all(np.isfinite(eta)) or not np.any(eta):
            raise ValueError(f"eta must be a finite nonzero 3-vector, got {self.eta!r}")
        if self.gamma == 0 or not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite and nonzero")
        if not np.isfinite(self.J0):
            raise ValueError("J0 must be finite")
        object.__setattr__(self, "eta", tuple(float(x) for x in eta))

    @property
    def d(self) -> int:
        return int(round(2 * self.qudit_spin + 1))

    @property
    def eta_A(self) -> np.ndarray:
        return np.asarray(self.eta)

    @property
    def eta_B(self) -> np.ndarray:
        return np.asarray(self.eta) / self.gamma

    @classmethod
    def unit_anisotropy(cls, direction, **kw) -> "SystemConfig":
        """Config with ``eta`` normalised to a unit vector."""
        v = np.asarray(direction, dtype=float)
        return cls(eta=tuple(v / np.linalg.norm(v)), **kw)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix with its subsystem layout, validated on construction."""

    data: np.ndarray
    dims: tuple = field(default=(2, 2))
    tol: float = 1e-10

    def __post_init__(self):
        a = np.asarray(self.data, dtype=complex)
        n = int(np.prod(self.dims))
        if a.shape != (n, n):
            raise BadSubsystem(f"matrix shape {a.shape} does not match dims {self.dims}")
        herm = np.max(np.abs(a - a.conj().T))
        if herm > self.tol:
            raise ValueError(f"density matrix not Hermitian (error {herm:.2e})")
        tr = np.trace(a).real
        if abs(tr - 1) > self.tol:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        lam_min = np.linalg.eigvalsh(0.5 * (a + a.conj().T)).min()
        if lam_min < -self.tol:
            raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "data", a)
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.data, self.data)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)


def _bell_projector_sum(w: BellWeighting) -> np.ndarray:
    b = bell_states()
    return np.einsum("i,ij,ik->jk", w.array, b, b.conj())


def bell_mixture(w: BellWeighting) -> DensityMatrix:
    """Two-qubit Bell-diagonal state with the given weights."""
    return DensityMatrix(_bell_projector_sum(w), (2, 2))


def initial_mixed(w: BellWeighting, cfg: SystemConfig) -> DensityMatrix:
    """Bell-diagonal AB state tensored with the qudit in its highest-weight state."""
    d = cfg.d
    c = np.zeros((d, d), dtype=complex)
    c[0, 0] = 1.0
    return DensityMatrix(np.kron(_bell_projector_sum(w), c), (2, 2, d))


def initial_pure(w: BellWeighting, spin=None) -> DensityMatrix:
    """Rank-one A(x)B(x)C state pairing each nonzero Bell weight with a qudit level.

    The k-th nonzero-weight Bell state (in alpha+, alpha-, beta+, beta- order)
    is paired with the k-th spin-z eigenstate of C in descending m. ``spin``
    defaults to the group assignment of the weighting label.
    """
    if spin is None:
        spin = grouped_qudit_spin(w.label)
    d = int(round(2 * float(spin) + 1))
    spin_matrices(spin)
    idx = w.nonzero
    if len(idx) > d:
        raise WeightCountMismatch(f"{len(idx)} nonzero weights but qudit dimension {d}")
    b = bell_states()
    psi = np.zeros(4 * d, dtype=complex)
    for level, i in enumerate(idx):
        ket_c = np.zeros(d)
        ket_c[level] = 1.0
        psi += np.sqrt(w.weights[i]) * np.kron(b[i], ket_c)
    return DensityMatrix(np.outer(psi, psi.conj()), (2, 2, d))


def initial_state(label, epsilon: float, kind: str, mixed_policy: str = "qubit",
                  cfg: SystemConfig | None = None) -> tuple[DensityMatrix, SystemConfig]:
    """Initial A(x)B(x)C state for a table row and the config that matches it."""
    w = weighting(label, epsilon)
    spin = qudit_spin_for(label, kind, mixed_policy)
    base = cfg or SystemConfig()
    cfg = SystemConfig(qudit_spin=spin, eta=base.eta, gamma=base.gamma, J0=base.J0)
    if kind == "mixed":
        return initial_mixed(w, cfg), cfg
    if kind == "pure":
        return initial_pure(w, spin), cfg
    raise ValueError(f"state kind must be 'mixed' or 'pure', got {kind!r}")


_NAMES = {"A": 0, "B": 1, "C": 2}


def _subsystem_indices(keep: Iterable, n: int) -> list[int]:
    out = []
    for k in keep:
        i = _NAMES.get(k, k) if isinstance(k, str) else k
        if not isinstance(i, (int, np.integer)) or not 0 <= i < n:
            raise BadSubsystem(f"subsystem {k!r} not among {n} subsystems")
        out.append(int(i))
    if len(set(out)) != len(out):
        raise BadSubsystem("duplicate subsystem in keep set")
    return sorted(out)


def partial_trace_array(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Partial trace on raw arrays; ``rho`` may carry leading batch axes."""
    dims = tuple(int(x) for x in dims)
    keep = _subsystem_indices(keep, len(dims))
    n = len(dims)
    batch = rho.shape[:-2]
    t = rho.reshape(batch + dims + dims)
    nb = len(batch)
    letters = "abcdefghijklmnopqrstuvwxyz"
    bl = "".join(letters[20 + i] for i in range(nb))
    row = [letters[i] for i in range(n)]
    col = [letters[i] if i not in keep else letters[10 + i] for i in range(n)]
    out = bl + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    t = np.einsum(bl + "".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(batch + (dk, dk))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (indices or 'A', 'B', 'C')."""
    idx = _subsystem_indices(keep, len(rho.dims))
    red = partial_trace_array(rho.data, rho.dims, idx)
    return DensityMatrix(red, tuple(rho.dims[i] for i in idx) or (1,))
