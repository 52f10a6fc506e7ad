"""Dense complex matrix helpers: validation, classification and eigendecomposition.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Hermitian
matrices are diagonalised with a cyclic complex Jacobi method; normal
matrices go through the commuting Hermitian pair ``H = (A + A*)/2`` and
``K = (A - A*)/2i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    NoConvergenceError,
    NonFiniteEntryError,
    NonSquareError,
    NotHermitianError,
    NotNormalError,
    check_k,
)

TOL_CLASS = 1e-10
CLUSTER_TOL = 1e-8
JACOBI_MAX_SWEEPS = 60


class MatrixClass(str, enum.Enum):
    HERMITIAN = "Hermitian"
    NORMAL = "NormalNonHermitian"
    GENERAL = "General"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicity, plus a unitary eigenbasis for normal sources."""

    eigenvalues: np.ndarray
    eigenbasis: Optional[np.ndarray] = None
    source_norm: float = 0.0

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def is_real(self, tol: float = 1e-10) -> bool:
        ev = np.asarray(self.eigenvalues)
        return bool(np.all(np.abs(ev.imag) <= tol * (1.0 + self.source_norm)))


def as_matrix(A) -> np.ndarray:
    """Return ``A`` as a square complex128 array, rejecting bad shapes and NaN/Inf."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise NonSquareError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteEntryError("matrix contains NaN or infinite entries")
    return M


def adjoint(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def herm(X: np.ndarray) -> np.ndarray:
    """Hermitian part (X + X*)/2 (works on stacks of matrices)."""
    return 0.5 * (X + np.swapaxes(X, -1, -2).conj())


def opnorm(A: np.ndarray) -> float:
    """Operator (spectral) norm."""
    return float(np.linalg.norm(A, 2))


def classify(A, tol_class: float = TOL_CLASS) -> MatrixClass:
    A = as_matrix(A)
    if tol_class <= 0:
        raise ValueError("tol_class must be positive")
    fro = np.linalg.norm(A)
    if np.linalg.norm(A - adjoint(A)) <= tol_class * (1.0 + fro):
        return MatrixClass.HERMITIAN
    comm = A @ adjoint(A) - adjoint(A) @ A
    if np.linalg.norm(comm) <= tol_class * (1.0 + fro**2):
        return MatrixClass.NORMAL
    return MatrixClass.GENERAL


def _jacobi(A: np.ndarray, eps: float = 1e-14):
    """Cyclic complex Jacobi sweeps. Returns (diagonal, accumulated unitary)."""
    n = A.shape[0]
    A = herm(A.copy())
    V = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return A.diagonal().real.copy(), V
    thresh = eps * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(A[~np.eye(n, dtype=bool)])
        if off <= thresh:
            return A.diagonal().real.copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag < 1e-3 * thresh / n:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] makes the (p, q) block real and diagonal
                G = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = adjoint(G) @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ G
    raise NoConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def eig_hermitian(A, tol_class: float = TOL_CLASS) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are real and sorted ascending; the eigenbasis is unitary.
    """
    A = as_matrix(A)
    if classify(A, tol_class) is not MatrixClass.HERMITIAN:
        raise NotHermitianError("eig_hermitian requires a Hermitian matrix")
    w, V = _jacobi(A)
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], V[:, order], opnorm(A))


def eig_normal(A, tol_class: float = TOL_CLASS, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    """Eigendecomposition of a normal matrix via simultaneous diagonalisation.

    H = (A + A*)/2 is diagonalised first; K = (A - A*)/2i is then
    diagonalised inside every eigenspace of H (eigenvalues of H closer than
    ``cluster_tol * (1 + ||H||_F)`` form one eigenspace).
    """
    A = as_matrix(A)
    if classify(A, tol_class) is MatrixClass.GENERAL:
        raise NotNormalError("eig_normal requires a normal matrix")
    H = herm(A)
    K = (A - adjoint(A)) / 2j
    h, U = _jacobi(H)
    order = np.argsort(h, kind="stable")
    h, U = h[order], U[:, order]
    gap = cluster_tol * (1.0 + np.linalg.norm(H))
    start = 0
    n = len(h)
    for i in range(1, n + 1):
        if i == n or h[i] - h[i - 1] > gap:
            if i - start > 1:
                block = U[:, start:i]
                _, W = _jacobi(adjoint(block) @ K @ block)
                U[:, start:i] = block @ W
            start = i
    # Rayleigh quotients on the joint eigenbasis
    ev = np.einsum("ij,ik,kj->j", U.conj(), A, U)
    return Spectrum(ev, U, opnorm(A))


def eigenvalues(A, tol_class: float = TOL_CLASS) -> Spectrum:
    """Spectrum of any matrix: Jacobi / commuting-pair paths when possible, LAPACK otherwise."""
    A = as_matrix(A)
    cls = classify(A, tol_class)
    if cls is MatrixClass.HERMITIAN:
        return eig_hermitian(A, tol_class)
    if cls is MatrixClass.NORMAL:
        return eig_normal(A, tol_class)
    return Spectrum(np.linalg.eigvals(A), None, opnorm(A))


def direct_sum_conjugate(A) -> np.ndarray:
    """Block-diagonal ``diag(A, A*)``."""
    A = as_matrix(A)
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n] = A
    out[n:, n:] = adjoint(A)
    return out


def psd_power(P: np.ndarray, power: float) -> np.ndarray:
    """P**power for Hermitian PSD P; small negative eigenvalues are clipped to zero."""
    w, V = _jacobi(P)
    w = np.clip(w, 0.0, None) ** power
    return (V * w) @ adjoint(V)


def central_power(A, mu: complex, k: int, absolute: bool = False) -> np.ndarray:
    """(A - mu I)^k, or |A - mu I|^k = ((A - mu)*(A - mu))^(k/2) when ``absolute``."""
    A = as_matrix(A)
    k = check_k(k)
    B = A - mu * np.eye(A.shape[0])
    if not absolute:
        return np.linalg.matrix_power(B, k)
    P = adjoint(B) @ B
    if k % 2 == 0:
        return np.linalg.matrix_power(herm(P), k // 2)
    return psd_power(P, k / 2.0)
