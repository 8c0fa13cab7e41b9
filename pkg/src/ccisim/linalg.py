"""Dense complex linear algebra for the small (2x2 .. 4x4) matrices used here.

Everything is a plain ndarray; validation helpers enforce the Hermitian /
unitary / state-vector contracts at the tolerances the rest of the package
relies on.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
MIN_DIM = 2
MAX_DIM = 4


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def herm_defect(m: np.ndarray) -> float:
    """Max elementwise deviation from M = M+."""
    return float(np.max(np.abs(m - dagger(m))))


def unitary_defect(u: np.ndarray) -> float:
    """Max elementwise deviation of U+ U from the identity."""
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def _check_square(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not MIN_DIM <= m.shape[0] <= MAX_DIM:
        raise ValueError(f"{name} must have dimension {MIN_DIM}..{MAX_DIM}, got {m.shape[0]}")
    return m


def require_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL, name: str = "matrix") -> np.ndarray:
    m = _check_square(m, name)
    defect = herm_defect(m)
    if defect > atol:
        raise ValueError(f"{name} is not Hermitian: max |M - M+| = {defect:.3e} > {atol:.1e}")
    return m


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns). Rejects
    non-Hermitian input with a diagnostic.
    """
    m = require_hermitian(m)
    return np.linalg.eigh(m)


def expm_i(m: np.ndarray, t: float) -> np.ndarray:
    """exp(-i M t) for Hermitian M, via eigendecomposition.

    The result is unitary by construction: V diag(e^{-i w t}) V+.
    """
    w, v = eig_hermitian(m)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def evolve(m: np.ndarray, t: np.ndarray, psi0: np.ndarray) -> np.ndarray:
    """States exp(-i M t_k) psi0 for an array of times, shape (len(t), dim)."""
    w, v = eig_hermitian(m)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    amp0 = dagger(v) @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(t, w)) * amp0
    return phases @ v.T


def projector(psi: np.ndarray) -> np.ndarray:
    """Density matrix |psi><psi| of a pure state."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, np.conj(psi))


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Overlap <target| rho |target> of a density matrix with a pure state."""
    rho = np.asarray(rho, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if rho.shape != (target.size, target.size):
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs target length {target.size}")
    val = np.conj(target) @ rho @ target
    if abs(val.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary residue {val.imag:.3e}")
    return float(val.real)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2x2 operators; the first factor is the slow index."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"tensor supports 2x2 factors only, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def phase_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between A and B minimized over a global phase of B.

    The optimal phase is Tr(B+ A)/|Tr(B+ A)|; near-traceless overlaps fall
    back to the plain distance.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    tr = np.trace(dagger(b) @ a)
    if abs(tr) < 1e-12:
        return float(np.max(np.abs(a - b)))
    c = tr / abs(tr)
    return float(np.max(np.abs(a - c * b)))
