"""Triple operator integrals over finite spectral measures.

``W = iiint Psi(x1, x2, x3) dE1(x1) T dE2(x2) R dE3(x3)``. In the eigenbases
``U1, U2, U3`` of the three measures, with ``T' = U1* T U2`` and
``R' = U2* R U3``::

    W = U1 G U3*,   G[i, k] = sum_j Psi(l_i, m_j, n_k) T'[i, j] R'[j, k].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .doi import decompose
from .linalg import ShapeError, as_matrix, operator_norm, schatten_1

SHAPES = ("vec-mat-vec", "vec-vec-mat", "mat-vec-vec")


@dataclass(frozen=True)
class Kernel3:
    """A function of three real variables, vectorized under broadcasting."""

    func: Callable
    description: str = ""

    def __call__(self, x1, x2, x3):
        return self.func(x1, x2, x3)

    def tensor(self, l, m, n) -> np.ndarray:
        l, m, n = (np.asarray(v, dtype=float) for v in (l, m, n))
        out = self.func(l[:, None, None], m[None, :, None], n[None, None, :])
        return np.broadcast_to(np.asarray(out, dtype=complex), (len(l), len(m), len(n)))

    def permuted(self) -> "Kernel3":
        """``(y1, y2, y3) -> Psi(y3, y1, y2)``: the kernel seen by the
        cyclically reordered measures ``(E2, E3, E1)``."""
        return Kernel3(lambda y1, y2, y3: self.func(y3, y1, y2), f"cyc({self.description})")


def _contract(Psi, D1, T, D2, R, D3):
    U1, U2, U3 = D1.eigenvectors, D2.eigenvectors, D3.eigenvectors
    Tp = U1.conj().T @ T @ U2
    Rp = U2.conj().T @ R @ U3
    G = np.einsum("ijk,ij,jk->ik", Psi, Tp, Rp, optimize=True)
    return U1 @ G @ U3.conj().T


def _check_dims(D1, T, D2, R, D3):
    T = as_matrix(T, "T")
    R = as_matrix(R, "R")
    if T.shape != (D1.n, D2.n) or R.shape != (D2.n, D3.n):
        raise ShapeError(
            f"incompatible dimensions: E1 {D1.n}, T {T.shape}, E2 {D2.n}, R {R.shape}, E3 {D3.n}"
        )
    return T, R


def toi_direct(psi: Kernel3, E1, T, E2, R, E3) -> np.ndarray:
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    T, R = _check_dims(D1, T, D2, R, D3)
    Psi = psi.tensor(D1.eigenvalues, D2.eigenvalues, D3.eigenvalues)
    return _contract(Psi, D1, T, D2, R, D3)


def projector_triple_sum(psi, E1, T, E2, R, E3) -> np.ndarray:
    """Slow reference: ``sum_{i,j,k} Psi P_i T P'_j R P''_k``."""
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    T, R = _check_dims(D1, T, D2, R, D3)
    out = np.zeros((D1.n, D3.n), dtype=complex)
    for i in range(D1.n):
        PT = D1.projector(i) @ T
        for j in range(D2.n):
            PTPR = PT @ D2.projector(j) @ R
            for k in range(D3.n):
                w = complex(psi(D1.eigenvalues[i], D2.eigenvalues[j], D3.eigenvalues[k]))
                out += w * (PTPR @ D3.projector(k))
    return out


@dataclass(frozen=True)
class HaagerupRep:
    """Factor families of a Haagerup-type representation.

    Each factor is a callable taking an array of points ``x`` (length n) and
    returning samples: an array ``(P, n)`` for a vector family or
    ``(P, Q, n)`` for a matrix family. ``shape`` says which slot holds the
    matrix family:

    * ``"vec-mat-vec"``: ``sum_{p,q} alpha_p(x1) beta_pq(x2) gamma_q(x3)``
    * ``"vec-vec-mat"``: ``sum_{p,q} alpha_p(x1) beta_q(x2) gamma_pq(x3)``
    * ``"mat-vec-vec"``: ``sum_{p,q} alpha_pq(x1) beta_p(x2) gamma_q(x3)``

    ``bounds`` optionally records global sup-norm bounds of the three factors
    (``l2`` for vector families, operator norm for the matrix one).
    """

    alphas: Callable
    betas: Callable
    gammas: Callable
    shape: str
    bounds: tuple | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")

    def samples(self, l, m, n):
        a = np.asarray(self.alphas(np.asarray(l, dtype=float)))
        b = np.asarray(self.betas(np.asarray(m, dtype=float)))
        c = np.asarray(self.gammas(np.asarray(n, dtype=float)))
        for arr in (a, b, c):
            if not np.all(np.isfinite(arr)):
                raise ValueError("representation has non-finite factor values")
        return a, b, c

    def kernel_tensor(self, l, m, n) -> np.ndarray:
        a, b, c = self.samples(l, m, n)
        spec = {
            "vec-mat-vec": "pi,pqj,qk->ijk",
            "vec-vec-mat": "pi,qj,pqk->ijk",
            "mat-vec-vec": "pqi,pj,qk->ijk",
        }[self.shape]
        return np.einsum(spec, a, b, c, optimize=True)

    def kernel(self) -> Kernel3:
        def func(x1, x2, x3):
            x1, x2, x3 = np.broadcast_arrays(x1, x2, x3)
            flat = [np.ravel(v) for v in (x1, x2, x3)]
            a, b, c = self.samples(*flat)
            spec = {
                "vec-mat-vec": "pi,pqi,qi->i",
                "vec-vec-mat": "pi,qi,pqi->i",
                "mat-vec-vec": "pqi,pi,qi->i",
            }[self.shape]
            return np.einsum(spec, a, b, c).reshape(x1.shape)

        return Kernel3(func, f"haagerup[{self.shape}]")

    def factor_norms(self, l, m, n) -> tuple:
        """Sup over the given atoms of each factor's pointwise norm: the
        ``L^inf(E)`` norms for finite atomic spectral measures."""
        a, b, c = self.samples(l, m, n)
        slot = self.shape.split("-")

        def norm(arr, kind):
            if kind == "vec":
                return float(np.sqrt((np.abs(arr) ** 2).sum(axis=0)).max())
            return max(operator_norm(arr[:, :, t]) for t in range(arr.shape[2]))

        return tuple(norm(arr, kind) for arr, kind in zip((a, b, c), slot))

    def norm_bound(self, l, m, n) -> float:
        """Product of the factor norms: an upper bound for the tensor norm
        (one representation, not the infimum)."""
        return float(np.prod(self.factor_norms(l, m, n)))


def toi_haagerup(rep: HaagerupRep, E1, T, E2, R, E3) -> np.ndarray:
    """``sum alpha(A1) T beta(A2) R gamma(A3)`` evaluated factor by factor."""
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    T, R = _check_dims(D1, T, D2, R, D3)
    a, b, c = rep.samples(D1.eigenvalues, D2.eigenvalues, D3.eigenvalues)
    U1, U2, U3 = D1.eigenvectors, D2.eigenvectors, D3.eigenvectors
    Tp = U1.conj().T @ T @ U2
    Rp = U2.conj().T @ R @ U3
    # G[i, k] = sum_{p,q} a(i) Tp[i, j] b(j) Rp[j, k] c(k), contracted over the
    # family indices first so the cost is O(P Q n^2) rather than per-term
    if rep.shape == "vec-mat-vec":
        X = np.einsum("pqj,qk->pjk", b, c, optimize=True)
        Y = np.einsum("pi,pjk->ijk", a, X, optimize=True)
    elif rep.shape == "vec-vec-mat":
        X = np.einsum("qj,pqk->pjk", b, c, optimize=True)
        Y = np.einsum("pi,pjk->ijk", a, X, optimize=True)
    else:
        X = np.einsum("pqi,qk->pik", a, c, optimize=True)
        Y = np.einsum("pj,pik->ijk", b, X, optimize=True)
    G = np.einsum("ijk,ij,jk->ik", Y, Tp, Rp, optimize=True)
    return U1 @ G @ U3.conj().T


def toi_trace_duality_check(psi: Kernel3, E1, T, E2, R, E3, Q) -> float:
    """``|trace(W Q) - trace(V T)|`` where ``V`` is the integral with the
    measures reordered ``(E2, E3, E1)`` and operators ``R, Q`` between them.

    ``V = iiint Psi dE2(x2) R dE3(x3) Q dE1(x1)``; by cyclicity of the trace
    both sides equal ``sum Psi tr(P_i T P'_j R P''_k Q)``. The residual is
    normalized by ``max(1, max|Psi| ||T||_1 ||R|| ||Q||)``.
    """
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    T, R = _check_dims(D1, T, D2, R, D3)
    Q = as_matrix(Q, "Q")
    if Q.shape != (D3.n, D1.n):
        raise ShapeError(f"Q must be {D3.n}x{D1.n}, got {Q.shape}")
    W = toi_direct(psi, D1, T, D2, R, D3)
    V = toi_direct(psi.permuted(), D2, R, D3, Q, D1)
    lhs = np.trace(W @ Q)
    rhs = np.trace(V @ T)
    Psi = psi.tensor(D1.eigenvalues, D2.eigenvalues, D3.eigenvalues)
    scale = max(1.0, float(np.abs(Psi).max()) * schatten_1(T) * operator_norm(R) * operator_norm(Q))
    return float(abs(lhs - rhs)) / scale


def s1_bound_check(rep: HaagerupRep, E1, T, E2, R, E3):
    """``(||W||_1, bound * ||T||_1 * ||R||)`` for the ``vec-vec-mat`` shape,
    or ``(||W||_1, bound * ||T|| * ||R||_1)`` for ``mat-vec-vec``."""
    if rep.shape == "vec-mat-vec":
        raise ValueError("trace-class bound needs shape 'vec-vec-mat' or 'mat-vec-vec'")
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    W = toi_haagerup(rep, D1, T, D2, R, D3)
    bound = rep.norm_bound(D1.eigenvalues, D2.eigenvalues, D3.eigenvalues)
    if rep.shape == "vec-vec-mat":
        rhs = bound * schatten_1(T) * operator_norm(R)
    else:
        rhs = bound * operator_norm(T) * schatten_1(R)
    return schatten_1(W), rhs


def operator_bound_check(rep: HaagerupRep, E1, T, E2, R, E3):
    """``(||W||, bound * ||T|| * ||R||)`` for the ``vec-mat-vec`` shape."""
    if rep.shape != "vec-mat-vec":
        raise ValueError("operator-norm bound needs shape 'vec-mat-vec'")
    D1, D2, D3 = decompose(E1), decompose(E2), decompose(E3)
    W = toi_haagerup(rep, D1, T, D2, R, D3)
    bound = rep.norm_bound(D1.eigenvalues, D2.eigenvalues, D3.eigenvalues)
    return operator_norm(W), bound * operator_norm(T) * operator_norm(R)
