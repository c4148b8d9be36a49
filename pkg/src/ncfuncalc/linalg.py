"""Dense complex matrix kernels: Hermitian eigensystems, singular values, norms.

Every finite self-adjoint matrix ``H`` is treated as a spectral measure with
atoms at its eigenvalues; :class:`SpectralDecomposition` is the finite stand-in
for that measure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12


class ShapeError(ValueError):
    """Raised when matrix dimensions are incompatible."""


def as_matrix(M, name="matrix") -> np.ndarray:
    """Validate and return ``M`` as a finite 2-D complex array."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M.astype(complex, copy=False)


def check_hermitian(H, name="H") -> np.ndarray:
    H = as_matrix(H, name)
    if H.shape[0] != H.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {H.shape}")
    scale = 1.0 + (np.abs(H).max() if H.size else 0.0)
    asym = np.abs(H - H.conj().T).max() if H.size else 0.0
    if asym > HERMITIAN_TOL * scale:
        raise ValueError(f"{name} is not Hermitian: max|H - H*| = {asym:.3e}")
    return H


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def apply(self, g) -> np.ndarray:
        """Ordinary functional calculus ``g(H)`` for a vectorized scalar ``g``."""
        U = self.eigenvectors
        return (U * np.asarray(g(self.eigenvalues))) @ U.conj().T

    def projector(self, i: int) -> np.ndarray:
        u = self.eigenvectors[:, i]
        return np.outer(u, u.conj())

    def conjugate(self, W) -> "SpectralDecomposition":
        """Decomposition of ``W H W*`` for unitary ``W``."""
        return SpectralDecomposition(self.eigenvalues, np.asarray(W) @ self.eigenvectors)


def _sorted(lam, U) -> SpectralDecomposition:
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(np.ascontiguousarray(lam[order]), np.ascontiguousarray(U[:, order]))


def jacobi_eigh(H, tol=1e-15, max_sweeps=60):
    """Cyclic complex Jacobi with threshold sweeps.

    Returns ``(eigenvalues, U)`` in the order the rotations leave them
    (unsorted). Each rotation removes the phase of ``H[p, q]`` and then applies
    a real Givens rotation.
    """
    A = check_hermitian(H).copy()
    n = A.shape[0]
    U = np.eye(n, dtype=complex)
    if n < 2:
        return A.diagonal().real.copy(), U
    fro = np.linalg.norm(A)
    if fro == 0.0:
        return np.zeros(n), U
    for sweep in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= tol * fro:
            break
        # threshold sweeps: skip tiny pivots early on
        thresh = 0.2 * off / n**2 if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                ab = abs(b)
                if ab <= thresh or ab == 0.0:
                    continue
                a_pp = A[p, p].real
                a_qq = A[q, q].real
                if sweep > 3 and ab < 1e-18 * (abs(a_pp) + abs(a_qq)):
                    A[p, q] = A[q, p] = 0.0
                    continue
                phase = b / ab
                zeta = (a_qq - a_pp) / (2.0 * ab)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of the unitary G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ g
                A[idx, :] = g.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                U[:, idx] = U[:, idx] @ g
    return A.diagonal().real.copy(), U


def eig_hermitian(H, method="lapack") -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="jacobi"`` uses :func:`jacobi_eigh`; the default calls LAPACK's
    ``zheevd``. Ties keep the solver's column order (stable sort).
    """
    H = check_hermitian(H)
    if method == "jacobi":
        lam, U = jacobi_eigh(H)
    elif method == "lapack":
        lam, U = np.linalg.eigh(H)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _sorted(np.asarray(lam, dtype=float), np.asarray(U, dtype=complex))


def singular_values(M) -> np.ndarray:
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def operator_norm(M) -> float:
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0


def schatten_1(M) -> float:
    return float(np.sum(singular_values(M)))


def random_hermitian(rng, n, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (G + G.conj().T) / 2


def random_unitary(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))
