"""Sinc expansion of divided differences and the perturbation formulas.

For ``f`` bounded with spectrum in the ball of radius ``sigma`` and grid step
``h = pi / sigma``::

    (f(x1, y) - f(x2, y)) / (x1 - x2) = sum_{j,k} s_j(x1) s_k(x2) Gamma_jk(y),

where ``s_j(x) = sinc(x/h - j)`` and ``Gamma_jk(y)`` is the divided difference
of ``f(., y)`` between the nodes ``jh`` and ``kh`` (the x-derivative when
``j == k``). The family ``s_j`` satisfies ``sum_j s_j(x)**2 = 1``. Sums are
truncated to ``|j|, |k| <= J``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .doi import decompose
from .functions2d import Function2D
from .linalg import operator_norm
from .toi import HaagerupRep, Kernel3, toi_direct, toi_haagerup

DEFAULT_J = 256
# default sigma = OVERSAMPLE * band radius; at sigma == band radius (critical
# sampling) the truncated series converges only like 1/J
OVERSAMPLE = 1.5
# below this relative gap the divided difference uses the midpoint derivative
_DIAG_REL = 1e-7


class BandError(ValueError):
    """The band-limit hypothesis of the sinc expansion fails."""


class CoverageError(ValueError):
    """A spectrum lies outside the range the truncated sinc grid covers."""

    def __init__(self, msg, required_J):
        super().__init__(msg)
        self.required_J = required_J


def sinc_basis(x, j, h=np.pi):
    """``sin(pi (x/h - j)) / (pi (x/h - j))`` with value 1 at ``x = jh``."""
    return np.sinc(np.asarray(x, dtype=float) / h - np.asarray(j))


def sinc_matrix(x, J, h=np.pi) -> np.ndarray:
    """``S[j + J, i] = s_j(x[i])`` for ``|j| <= J``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.sinc(x[None, :] / h - np.arange(-J, J + 1)[:, None])


def partition_deficit(x, J, h=np.pi):
    """``1 - sum_{|j|<=J} s_j(x)**2``."""
    return 1.0 - (sinc_matrix(x, J, h) ** 2).sum(axis=0)


def _check_band(f, h):
    limit = np.pi / h
    if f.band_radius > limit * (1 + 1e-12):
        raise BandError(f"band radius {f.band_radius:.6g} exceeds pi/h = {limit:.6g}")


def divided_difference(f: Function2D, x1, x2, y, axis="x"):
    """``(f(x1, y) - f(x2, y)) / (x1 - x2)``, derivative on the diagonal.

    ``axis="y"`` differences the second argument: ``(f(y, x1) - f(y, x2)) / (x1 - x2)``
    with ``y`` then playing the role of the first coordinate.
    """
    if axis == "y":
        f = f.swap()
    x1, x2, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, y)))
    d = x1 - x2
    near = np.abs(d) <= _DIAG_REL * (1.0 + np.abs(x1) + np.abs(x2))
    safe = np.where(near, 1.0, d)
    mid = (x1 + x2) / 2
    dd = (f(x1, y) - f(x2, y)) / safe
    return np.where(near, f.partial_x(mid, y), dd)


@dataclass(frozen=True)
class DividedDifferenceKernel(Kernel3):
    """``Psi(x1, x2, y) = (f(x1, y) - f(x2, y)) / (x1 - x2)`` (axis ``"x"``) or
    ``Psi(x, y1, y2) = (f(x, y1) - f(x, y2)) / (y1 - y2)`` (axis ``"y"``)."""

    f: Function2D = None
    axis: str = "x"

    @classmethod
    def of(cls, f, axis="x"):
        if axis == "x":
            func = lambda x1, x2, y: divided_difference(f, x1, x2, y)
        elif axis == "y":
            func = lambda x, y1, y2: divided_difference(f, y1, y2, x, axis="y")
        else:
            raise ValueError("axis must be 'x' or 'y'")
        return cls(func, f"divided-difference[{axis}]", f, axis)

    def tensor(self, l, m, n):
        # f is sampled on two n1 x n3 grids instead of the full n1 x n2 x n3 cube
        l, m, n = (np.asarray(v, dtype=float) for v in (l, m, n))
        if self.axis == "x":
            a, b, y, g = l, m, n, self.f
            Fa, Fb = g.grid(a, y), g.grid(b, y)  # (na, ny), (nb, ny)
            num = Fa[:, None, :] - Fb[None, :, :]
        else:
            a, b, y, g = m, n, l, self.f.swap()
            Fa, Fb = g.grid(a, y), g.grid(b, y)
            num = (Fa[:, None, :] - Fb[None, :, :]).transpose(2, 0, 1)
        d = a[:, None] - b[None, :]
        near = np.abs(d) <= _DIAG_REL * (1.0 + np.abs(a)[:, None] + np.abs(b)[None, :])
        safe = np.where(near, 1.0, d)
        if self.axis == "x":
            out = num / safe[:, :, None]
        else:
            out = num / safe[None, :, :]
        if near.any():
            ii, jj = np.nonzero(near)
            mid = (a[ii] + b[jj]) / 2
            der = np.asarray(g.partial_x(mid[:, None], y[None, :]), dtype=complex)
            der = np.broadcast_to(der, (len(ii), len(y)))
            if self.axis == "x":
                out[ii, jj, :] = der
            else:
                out[:, ii, jj] = der.T
        return out


def gamma_matrix(f: Function2D, y, J, h=np.pi, with_norm=False):
    """``Gamma[j+J, k+J] = (f(jh, y) - f(kh, y)) / ((j - k) h)``, diagonal
    ``df/dx(jh, y)``, for ``|j|, |k| <= J``. ``y`` may be an array, in which
    case the last axis runs over ``y``."""
    _check_band(f, h)
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    ys = np.atleast_1d(y)
    nodes = h * np.arange(-J, J + 1)
    vals = np.asarray(f.grid(nodes, ys))  # (2J+1, ny)
    der = np.asarray(f.partial_x(nodes[:, None], ys[None, :]), dtype=complex)
    der = np.broadcast_to(der, vals.shape)
    idx = np.arange(-J, J + 1)
    diff = (idx[:, None] - idx[None, :]) * h
    np.fill_diagonal(diff, 1.0)
    G = (vals[:, None, :] - vals[None, :, :]) / diff[:, :, None]
    G[idx + J, idx + J, :] = der
    if scalar:
        G = G[:, :, 0]
    if with_norm:
        norms = operator_norm(G) if scalar else np.array([operator_norm(G[:, :, t]) for t in range(G.shape[2])])
        return G, norms
    return G


def expand_divided_difference(f: Function2D, x1, x2, y, J=DEFAULT_J, h=np.pi):
    """Truncated ``sum s_j(x1) s_k(x2) Gamma_jk(y)``; arrays broadcast.

    With ``H[j, k] = 1 / ((j - k) h)`` off the diagonal (antisymmetric) and
    ``v_j = f(jh, y)`` the off-diagonal part of the sum is
    ``sum_j a_j v_j (H b)_j + sum_k b_k v_k (H a)_k`` for ``a = s(x1)``,
    ``b = s(x2)``, so no ``(2J+1)^2`` block is formed per point.
    """
    _check_band(f, h)
    x1, x2, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, y)))
    shape = x1.shape
    x1, x2, y = x1.ravel(), x2.ravel(), y.ravel()
    S1 = sinc_matrix(x1, J, h)
    S2 = sinc_matrix(x2, J, h)
    nodes = h * np.arange(-J, J + 1)
    uy, inv = np.unique(y, return_inverse=True)
    V = np.asarray(f.grid(nodes, uy), dtype=complex)[:, inv]
    D = np.asarray(f.partial_x(nodes[:, None], uy[None, :]), dtype=complex)
    D = np.broadcast_to(D, (len(nodes), len(uy)))[:, inv]
    idx = np.arange(-J, J + 1)
    diff = (idx[:, None] - idx[None, :]) * h
    np.fill_diagonal(diff, np.inf)
    H = 1.0 / diff
    off = (S1 * V * (H @ S2)).sum(axis=0) + (S2 * V * (H @ S1)).sum(axis=0)
    out = off + (S1 * S2 * D).sum(axis=0)
    return out.reshape(shape)


def sinc_haagerup_rep(f: Function2D, sigma, J=DEFAULT_J, axis="x", y_samples=None, with_bounds=True) -> HaagerupRep:
    """Haagerup representation of the divided difference of ``f``.

    Axis ``"x"`` gives shape ``vec-vec-mat`` (sinc factors on ``x1, x2``,
    Gamma on ``y``); axis ``"y"`` gives ``mat-vec-vec``. The stored bounds are
    ``(1, 1, max ||Gamma(y)||)`` with the maximum taken over ``y_samples``
    (default: 401 points in ``[-20, 20]``); the unit sinc bounds come from the
    partition identity.
    """
    h = np.pi / sigma
    g = f if axis == "x" else f.swap()
    _check_band(g, h)

    def sinc(x):
        return sinc_matrix(x, J, h)

    def gamma(y):
        return gamma_matrix(g, np.atleast_1d(y), J, h)

    bounds = None
    if with_bounds:
        if y_samples is None:
            y_samples = np.linspace(-20, 20, 401)
        gnorm = max(operator_norm(gamma_matrix(g, t, J, h)) for t in np.atleast_1d(y_samples))
        bounds = (1.0, 1.0, gnorm) if axis == "x" else (gnorm, 1.0, 1.0)
    if axis == "x":
        return HaagerupRep(sinc, sinc, gamma, "vec-vec-mat", bounds)
    if axis == "y":
        return HaagerupRep(gamma, sinc, sinc, "mat-vec-vec", bounds)
    raise ValueError("axis must be 'x' or 'y'")


def required_J(spectra, h):
    """Smallest truncation whose node range covers twice the spectral radius."""
    r = max(float(np.abs(np.asarray(s)).max()) for s in spectra if len(s))
    return int(np.ceil(2 * r / h))


def _covered(spectra, J, h):
    need = required_J(spectra, h)
    if need > J:
        raise CoverageError(f"spectrum not covered by J={J} (grid step {h:.4g}); need J >= {need}", need)


def _sigma(f, sigma):
    if sigma is not None:
        return float(sigma)
    if not np.isfinite(f.band_radius) or f.band_radius <= 0:
        return 1.0
    return OVERSAMPLE * float(f.band_radius)


def perturbation_formula_A(f: Function2D, A1, A2, B, J=DEFAULT_J, method="exact", sigma=None):
    """``f(A1, B) - f(A2, B)`` as ``iiint Psi dE_A1 (A1 - A2) dE_A2 dE_B``.

    ``method="exact"`` integrates the divided-difference kernel directly;
    ``method="sinc"`` uses the truncated sinc Haagerup representation.
    """
    D1, D2, D3 = decompose(A1), decompose(A2), decompose(B)
    T = D1.reconstruct() - D2.reconstruct()
    R = np.eye(D3.n)
    if method == "exact":
        return toi_direct(DividedDifferenceKernel.of(f, "x"), D1, T, D2, R, D3)
    if method == "sinc":
        s = _sigma(f, sigma)
        _covered([D1.eigenvalues, D2.eigenvalues], J, np.pi / s)
        rep = sinc_haagerup_rep(f, s, J, "x", with_bounds=False)
        return toi_haagerup(rep, D1, T, D2, R, D3)
    raise ValueError(f"unknown method {method!r}")


def perturbation_formula_B(f: Function2D, A, B1, B2, J=DEFAULT_J, method="exact", sigma=None):
    """``f(A, B1) - f(A, B2)`` as ``iiint Psi dE_A I dE_B1 (B1 - B2) dE_B2``."""
    D1, D2, D3 = decompose(A), decompose(B1), decompose(B2)
    T = np.eye(D1.n)
    R = D2.reconstruct() - D3.reconstruct()
    if method == "exact":
        return toi_direct(DividedDifferenceKernel.of(f, "y"), D1, T, D2, R, D3)
    if method == "sinc":
        s = _sigma(f, sigma)
        _covered([D2.eigenvalues, D3.eigenvalues], J, np.pi / s)
        rep = sinc_haagerup_rep(f, s, J, "y", with_bounds=False)
        return toi_haagerup(rep, D1, T, D2, R, D3)
    raise ValueError(f"unknown method {method!r}")
