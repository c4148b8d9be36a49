"""Schur multipliers and the operator-norm counterexample.

Inner-product convention (project-wide): ``(u, v) = sum_i u_i conj(v_i)``,
linear in the first slot. With ``P_j u = (u, f_j) f_j`` and
``Q_k u = (u, g_k) g_k``::

    P_j Q_k u = (u, g_k) (g_k, f_j) f_j,

so ``sum tau_jk P_j Q_k = F (tau o Mt) G*`` with pairing matrix
``Mt[j, k] = (g_k, f_j)`` and ``F``, ``G`` the isometries whose columns are
the two systems. Its norm is ``||tau o Mt||``, which is why the supremum over
orthonormal systems equals the Schur multiplier norm of ``tau``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .doi import eval_f_AB
from .functions2d import PhiLattice
from .linalg import SpectralDecomposition, operator_norm

CONTRACTION_TOL = 1e-10


@dataclass(frozen=True)
class SchurWitness:
    """A contraction ``M`` certifying ``||tau||_Schur >= ||tau o M||``."""

    M: np.ndarray
    ratio: float


@dataclass(frozen=True)
class CounterexampleInstance:
    N: int
    tau: np.ndarray
    M: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    B: np.ndarray
    f: PhiLattice
    F: np.ndarray  # columns f_j
    G: np.ndarray  # columns g_k

    @property
    def pairing(self) -> np.ndarray:
        """``Mt[j, k] = (g_k, f_j)``."""
        return self.F.conj().T @ self.G

    def projector_sum(self) -> np.ndarray:
        """``sum tau_jk P_j Q_k`` assembled term by term."""
        n = 2 * self.N
        out = np.zeros((n, n), dtype=complex)
        for j in range(self.N):
            P = np.outer(self.F[:, j], self.F[:, j].conj())
            for k in range(self.N):
                if self.tau[j, k] != 0:
                    out += self.tau[j, k] * (P @ np.outer(self.G[:, k], self.G[:, k].conj()))
        return out

    # A1, A2, B are built from known eigensystems; reuse them instead of
    # re-diagonalizing
    def decompositions(self):
        n = 2 * self.N
        nodes = 4 * np.pi * np.arange(1, self.N + 1)
        Fc = _complete(self.F)
        Gc = _complete(self.G)
        zeros = np.zeros(n - self.N)
        D1 = _spectral(np.concatenate([nodes, zeros]), Fc)
        D2 = _spectral(np.concatenate([nodes + 2 * np.pi, zeros]), Fc)
        DB = _spectral(np.concatenate([nodes, zeros]), Gc)
        return D1, D2, DB

    def f_A1_B(self, exact_spectra=False):
        if exact_spectra:
            D1, _, DB = self.decompositions()
            return eval_f_AB(self.f, D1, DB).value
        return eval_f_AB(self.f, self.A1, self.B).value

    def f_A2_B(self, exact_spectra=False):
        if exact_spectra:
            _, D2, DB = self.decompositions()
            return eval_f_AB(self.f, D2, DB).value
        return eval_f_AB(self.f, self.A2, self.B).value


def _complete(X):
    """Extend orthonormal columns ``X`` to a unitary."""
    n, m = X.shape
    if m == n:
        return X
    Q, _ = np.linalg.qr(np.hstack([X, np.eye(n, dtype=complex)]))
    # QR keeps span of the first m columns; restore X exactly there
    return np.hstack([X, Q[:, m:n]])


def _spectral(lam, U):
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(lam[order], U[:, order])


def triangular_truncation(N: int) -> np.ndarray:
    """``tau[j, k] = 1`` if ``j < k`` else 0."""
    j = np.arange(N)
    return (j[:, None] < j[None, :]).astype(float)


def hilbert_witness(N: int) -> np.ndarray:
    """``K[j, k] = 1 / (j - k + 1/2)``; ``||K|| < pi`` for every N."""
    j = np.arange(N)
    return 1.0 / (j[:, None] - j[None, :] + 0.5)


def _polar(C):
    W, _, Zh = np.linalg.svd(C)
    return W @ Zh


def _clip(M):
    """Project onto the unit ball of the operator norm (singular values <= 1)."""
    W, s, Zh = np.linalg.svd(M)
    return (W * np.minimum(s, 1.0)) @ Zh


def _ascent(tau, M, iters, tol=1e-13):
    best = operator_norm(tau * M)
    for _ in range(iters):
        W, s, Zh = np.linalg.svd(tau * M)
        u, v = W[:, 0], Zh[0].conj()
        # Re u*(tau o X)v = Re <X, C>_F; the contraction maximizing it is the
        # polar factor of C
        C = u[:, None] * np.conj(tau) * v.conj()[None, :]
        M_new = _polar(C)
        val = operator_norm(tau * M_new)
        if val <= best * (1 + tol):
            if val > best:
                M, best = M_new, val
            break
        M, best = M_new, val
    return M, best


def schur_norm_lower_bound(tau, restarts=4, iters=50, seed=0, starts=(), workers=1) -> SchurWitness:
    """Best ``||tau o M||`` over contractions reached by alternating ascent.

    Restart ``r`` starts from a Gaussian matrix drawn from sub-seed ``(seed, r)``
    clipped to the unit ball; ``starts`` adds caller-supplied contractions
    (e.g. analytic witnesses), and a matrix unit at the largest ``|tau_jk|``
    is always tried. The value never decreases along an ascent run.
    """
    tau = np.asarray(tau, dtype=complex)
    N = tau.shape[0]
    if not np.abs(tau).max() > 0:
        return SchurWitness(np.zeros_like(tau), 0.0)
    inits = [np.asarray(_clip(np.asarray(s, dtype=complex))) for s in starts]
    # a matrix unit at the largest entry certifies ratio >= max|tau|
    corner = np.zeros_like(tau)
    corner[np.unravel_index(np.argmax(np.abs(tau)), tau.shape)] = 1.0
    inits.append(corner)
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        Z = rng.standard_normal((N, tau.shape[1])) + 1j * rng.standard_normal((N, tau.shape[1]))
        inits.append(_clip(Z / operator_norm(Z)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda M0: _ascent(tau, M0, iters), inits))
    else:
        results = [_ascent(tau, M0, iters) for M0 in inits]
    # ties resolved by start order, so parallel runs merge identically
    M, ratio = max(results, key=lambda r: r[1])
    return SchurWitness(M, float(ratio))


def realize_systems(M):
    """Orthonormal systems in dimension 2N whose pairing matrix is ``M``.

    ``f_j = e_j (+) 0`` and ``g_k = M e_k (+) (I - M*M)^{1/2} e_k``. Returns
    ``(F, G)`` with the systems as columns.
    """
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    if M.shape != (N, N):
        raise ValueError("M must be square")
    if operator_norm(M) > 1 + CONTRACTION_TOL:
        raise ValueError(f"M is not a contraction: ||M|| = {operator_norm(M):.12g}")
    F = np.vstack([np.eye(N), np.zeros((N, N))]).astype(complex)
    D = np.eye(N) - M.conj().T @ M
    D = (D + D.conj().T) / 2
    w, V = np.linalg.eigh(D)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    G = np.vstack([M, root])
    return F, G


def build_counterexample(N, tau, M) -> CounterexampleInstance:
    """The lattice construction: ``A1 = sum 4 pi j P_j``,
    ``A2 = sum (4j + 2) pi P_j``, ``B = sum 4 pi k Q_k`` in dimension 2N, and
    ``f = PhiLattice(tau)``."""
    tau = np.asarray(tau)
    if tau.shape != (N, N):
        raise ValueError(f"tau must be {N}x{N}")
    if np.abs(tau).max(initial=0.0) > 1 + 1e-12:
        raise ValueError("entries of tau must satisfy |tau_jk| <= 1")
    F, G = realize_systems(M)
    nodes = 4 * np.pi * np.arange(1, N + 1)
    A1 = (F * nodes) @ F.conj().T
    A2 = (F * (nodes + 2 * np.pi)) @ F.conj().T
    B = (G * nodes) @ G.conj().T
    B = (B + B.conj().T) / 2
    return CounterexampleInstance(N, tau, np.asarray(M, dtype=complex), A1, A2, B, PhiLattice(tau), F, G)


