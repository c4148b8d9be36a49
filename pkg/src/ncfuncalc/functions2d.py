"""Bounded band-limited functions on the plane.

Two concrete carriers:

* :class:`TrigPoly2D` -- ``sum c[j, k] exp(i*omega*(j*x + k*y))``, the generic
  periodic function after rescaling.
* :class:`PhiLattice` -- ``sum tau[j, k] phi(x - 4*pi*j, y - 4*pi*k)`` with
  ``phi(x, y) = 4 * (1 - cos x)/x**2 * (1 - cos y)/y**2``, the interpolating
  family used for the operator-norm counterexample.

Every function exposes ``__call__``, ``partial_x``, ``partial_y`` (all
vectorized with numpy broadcasting), ``grid(xs, ys)`` returning the matrix
``f(xs[i], ys[j])``, a Euclidean ``band_radius`` and a coordinate-wise
``box_radius = (rx, ry)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TAYLOR_CUTOFF = 1e-4
DERIV_CUTOFF = 5e-2
# deficit factor eta in  sup|f| <= grid_max / (1 - eta)
SUP_ETA = 0.04


@dataclass(frozen=True)
class SupNormEstimate:
    upper: float
    lower: float

    @property
    def ratio(self) -> float:
        return self.upper / self.lower if self.lower > 0 else 1.0


class Function2D:
    band_radius: float = np.inf
    box_radius: tuple = (np.inf, np.inf)

    def __call__(self, x, y):
        raise NotImplementedError

    def partial_x(self, x, y):
        raise NotImplementedError

    def partial_y(self, x, y):
        raise NotImplementedError

    def grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.asarray(self(xs[:, None], ys[None, :]), dtype=complex) * np.ones((len(xs), len(ys)))

    def swap(self) -> "Function2D":
        """The function ``(x, y) -> f(y, x)``."""
        return Swapped(self)

    def sup_norm_estimate(self, radius=None) -> SupNormEstimate:
        raise NotImplementedError(f"{type(self).__name__} has no certified sup-norm")


@dataclass(frozen=True)
class Elementary2D(Function2D):
    """Wrapper for closed-form functions (``x``, ``x*y``, ``g(x)h(y)`` ...).

    Not necessarily bounded or band-limited; meant for identities where
    only evaluation and derivatives matter.
    """

    func: Callable
    dx: Callable | None = None
    dy: Callable | None = None
    band_radius: float = np.inf
    box_radius: tuple = (np.inf, np.inf)

    def __call__(self, x, y):
        return self.func(x, y)

    def partial_x(self, x, y):
        if self.dx is None:
            raise NotImplementedError("no x-derivative supplied")
        return self.dx(x, y)

    def partial_y(self, x, y):
        if self.dy is None:
            raise NotImplementedError("no y-derivative supplied")
        return self.dy(x, y)

    @classmethod
    def tensor(cls, g, h, dg=None, dh=None):
        """``(x, y) -> g(x) h(y)``."""
        return cls(
            lambda x, y: g(x) * h(y),
            None if dg is None else (lambda x, y: dg(x) * h(y)),
            None if dh is None else (lambda x, y: g(x) * dh(y)),
        )

    def grid(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = np.broadcast_to(self.func(xs[:, None], ys[None, :]), (len(xs), len(ys)))
        return np.array(out, dtype=complex)


@dataclass(frozen=True)
class Swapped(Function2D):
    inner: Function2D

    @property
    def band_radius(self):
        return self.inner.band_radius

    @property
    def box_radius(self):
        return tuple(reversed(self.inner.box_radius))

    def __call__(self, x, y):
        return self.inner(y, x)

    def partial_x(self, x, y):
        return self.inner.partial_y(y, x)

    def partial_y(self, x, y):
        return self.inner.partial_x(y, x)

    def grid(self, xs, ys):
        return self.inner.grid(ys, xs).T

    def swap(self):
        return self.inner

    def sup_norm_estimate(self, radius=None):
        return self.inner.sup_norm_estimate(radius)


# ---------------------------------------------------------------------------
# trigonometric polynomials


@dataclass(frozen=True)
class TrigPoly2D(Function2D):
    """``f(x, y) = sum_{j,k} coef[(j, k)] * exp(i*omega*(j*x + k*y))``."""

    omega: float
    coefs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        clean = {(int(j), int(k)): complex(c) for (j, k), c in self.coefs.items() if c != 0}
        object.__setattr__(self, "coefs", clean)
        if clean:
            jk = np.array(list(clean), dtype=int)
            c = np.array(list(clean.values()), dtype=complex)
        else:
            jk = np.zeros((0, 2), dtype=int)
            c = np.zeros(0, dtype=complex)
        object.__setattr__(self, "_jk", jk)
        object.__setattr__(self, "_c", c)

    @classmethod
    def from_array(cls, omega, C):
        """Coefficients from a ``(2N+1) x (2N+1)`` array indexed ``[j+N, k+N]``."""
        C = np.asarray(C, dtype=complex)
        N = (C.shape[0] - 1) // 2
        if C.shape != (2 * N + 1, 2 * N + 1):
            raise ValueError("coefficient array must be square with odd side")
        return cls(omega, {(j - N, k - N): C[j, k] for j, k in zip(*np.nonzero(C))})

    @classmethod
    def constant(cls, c, omega=1.0):
        return cls(omega, {(0, 0): c})

    @property
    def degree(self) -> int:
        return int(np.abs(self._jk).max()) if len(self._c) else 0

    @property
    def band_radius(self) -> float:
        if not len(self._c):
            return 0.0
        return float(self.omega * np.sqrt((self._jk.astype(float) ** 2).sum(axis=1)).max())

    @property
    def box_radius(self):
        if not len(self._c):
            return (0.0, 0.0)
        m = np.abs(self._jk).max(axis=0)
        return (float(self.omega * m[0]), float(self.omega * m[1]))

    def to_array(self, N=None) -> np.ndarray:
        N = self.degree if N is None else N
        C = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        for (j, k), c in self.coefs.items():
            C[j + N, k + N] += c
        return C

    def _sum(self, x, y, wj, wk):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        out = np.zeros(shape, dtype=complex)
        for (j, k), c in self.coefs.items():
            factor = c * (1j * self.omega * j) ** wj * (1j * self.omega * k) ** wk
            if factor != 0:
                out = out + factor * np.exp(1j * self.omega * (j * x + k * y))
        return out

    def __call__(self, x, y):
        return self._sum(x, y, 0, 0)

    def partial_x(self, x, y):
        return self._sum(x, y, 1, 0)

    def partial_y(self, x, y):
        return self._sum(x, y, 0, 1)

    def grid(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if not len(self._c):
            return np.zeros((len(xs), len(ys)), dtype=complex)
        js = np.unique(self._jk[:, 0])
        ks = np.unique(self._jk[:, 1])
        C = np.zeros((len(js), len(ks)), dtype=complex)
        C[np.searchsorted(js, self._jk[:, 0]), np.searchsorted(ks, self._jk[:, 1])] = self._c
        Ex = np.exp(1j * self.omega * np.outer(xs, js))
        Ey = np.exp(1j * self.omega * np.outer(ks, ys))
        return Ex @ C @ Ey

    def __add__(self, other):
        if not isinstance(other, TrigPoly2D) or other.omega != self.omega:
            return NotImplemented
        coefs = dict(self.coefs)
        for key, c in other.coefs.items():
            coefs[key] = coefs.get(key, 0) + c
        return TrigPoly2D(self.omega, coefs)

    def __mul__(self, a):
        return TrigPoly2D(self.omega, {key: a * c for key, c in self.coefs.items()})

    __rmul__ = __mul__

    def dilate(self, s) -> "TrigPoly2D":
        """``(x, y) -> f(s*x, s*y)``."""
        return TrigPoly2D(self.omega * s, self.coefs)

    def periodic_grid_values(self, M) -> np.ndarray:
        """Values on the ``M x M`` grid ``2*pi*(a, b)/(omega*M)`` via inverse FFT."""
        N = self.degree
        if M < 2 * N + 1:
            raise ValueError(f"grid of size {M} aliases degree {N}")
        S = np.zeros((M, M), dtype=complex)
        for (j, k), c in self.coefs.items():
            S[j % M, k % M] += c
        return np.fft.ifft2(S) * (M * M)

    def grid_size(self, radius) -> int:
        """Smallest periodic grid with ``radius**2 h**2 / 4 <= SUP_ETA`` that
        does not alias the coefficients."""
        period = 2 * np.pi / self.omega
        h_max = 2 * np.sqrt(SUP_ETA) / radius if radius > 0 else period
        return max(int(np.ceil(period / h_max)), 2 * self.degree + 1, 1)

    def sup_norm_estimate(self, radius=None) -> SupNormEstimate:
        """Certified bracket for ``sup |f|``.

        The maximum over a periodic grid with spacing ``h`` is a lower bound.
        At a maximizer the real part of a unimodular multiple of ``f`` has zero
        gradient and, by Bernstein's inequality, second directional derivative
        at most ``R**2 * sup|f|``; any point lies within ``h/sqrt(2)`` of the
        grid, so ``sup|f| <= grid_max / (1 - R**2 h**2 / 4)``. ``radius``
        overrides ``band_radius`` (must not be smaller).
        """
        R = self.band_radius if radius is None else float(radius)
        if R < self.band_radius * (1 - 1e-12):
            raise ValueError("radius below the band radius")
        if not len(self._c):
            return SupNormEstimate(0.0, 0.0)
        M = self.grid_size(R)
        h = 2 * np.pi / (self.omega * M)
        G = float(np.abs(self.periodic_grid_values(M)).max())
        eta = (R * h) ** 2 / 4
        return SupNormEstimate(G / (1 - eta), G)


def random_trig_poly(rng, degree, omega=1.0, band=None, real=False) -> TrigPoly2D:
    """Gaussian coefficients for ``|j|, |k| <= degree``, optionally clipped to a
    Euclidean band (``omega*|(j, k)| <= band``), normalized so that
    ``sum |c| = 1``. ``real=True`` enforces Hermitian symmetry."""
    coefs = {}
    for j in range(-degree, degree + 1):
        for k in range(-degree, degree + 1):
            if band is not None and omega * np.hypot(j, k) > band * (1 + 1e-12):
                continue
            coefs[(j, k)] = complex(rng.standard_normal(), rng.standard_normal())
    if real:
        coefs = {(j, k): (c + np.conj(coefs[(-j, -k)])) / 2 for (j, k), c in coefs.items()}
    total = sum(abs(c) for c in coefs.values())
    return TrigPoly2D(omega, {key: c / total for key, c in coefs.items()})


# ---------------------------------------------------------------------------
# phi lattice


def fejer(x):
    """``(1 - cos x) / x**2`` with its removable singularity filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < TAYLOR_CUTOFF
    xs = np.where(small, 1.0, x)
    x2 = x * x
    series = 0.5 - x2 / 24 + x2 * x2 / 720 - x2**3 / 40320
    # 2 sin^2(x/2) avoids the cancellation in 1 - cos x
    return np.where(small, series, 2 * np.sin(xs / 2) ** 2 / (xs * xs))


def fejer_prime(x):
    """Derivative of :func:`fejer`: ``(x sin x - 2 (1 - cos x)) / x**3``."""
    x = np.asarray(x, dtype=float)
    # the closed form cancels to O(eps / x**2) absolute, so the series takes over earlier
    small = np.abs(x) < DERIV_CUTOFF
    xs = np.where(small, 1.0, x)
    x2 = x * x
    series = x * (-1 / 12 + x2 * (1 / 180 + x2 * (-1 / 6720 + x2 / 453600)))
    exact = (xs * np.sin(xs) - 4 * np.sin(xs / 2) ** 2) / xs**3
    return np.where(small, series, exact)


def phi(x, y):
    return 4 * fejer(x) * fejer(y)


# fejer(t) <= 2 / t**2 and sum_m fejer(y - 4 pi m) <= 5/8 for every y
_ROW_SUM_BOUND = 5 / 8


@dataclass(frozen=True)
class PhiLattice(Function2D):
    """``f(x, y) = sum_{1<=j,k<=N} tau[j-1, k-1] * phi(x - 4 pi j, y - 4 pi k)``.

    The Fourier transform of ``phi`` is supported in ``[-1, 1]^2``, so
    ``box_radius = (1, 1)`` and the Euclidean band radius is ``sqrt 2``.
    """

    tau: np.ndarray

    band_radius = float(np.sqrt(2.0))
    box_radius = (1.0, 1.0)

    def __post_init__(self):
        tau = np.array(self.tau, dtype=complex)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise ValueError("tau must be a square matrix")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @property
    def N(self) -> int:
        return self.tau.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return 4 * np.pi * np.arange(1, self.N + 1)

    def _factors(self, xs, ys, dx=False, dy=False):
        xs = np.asarray(xs, dtype=float).ravel()
        ys = np.asarray(ys, dtype=float).ravel()
        fx = fejer_prime if dx else fejer
        fy = fejer_prime if dy else fejer
        return fx(xs[:, None] - self.nodes[None, :]), fy(ys[:, None] - self.nodes[None, :])

    def _grid(self, xs, ys, dx=False, dy=False):
        Fx, Fy = self._factors(xs, ys, dx, dy)
        tau = self.tau.real if not np.iscomplexobj(self.tau) or not self.tau.imag.any() else self.tau
        return 4 * (Fx @ tau @ Fy.T).astype(complex)

    def grid(self, xs, ys):
        return self._grid(xs, ys)

    def _pointwise(self, x, y, dx=False, dy=False):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        Fx, Fy = self._factors(x, y, dx, dy)
        return (4 * np.einsum("pj,jk,pk->p", Fx, self.tau, Fy)).reshape(x.shape)

    def __call__(self, x, y):
        return self._pointwise(x, y)

    def partial_x(self, x, y):
        return self._pointwise(x, y, dx=True)

    def partial_y(self, x, y):
        return self._pointwise(x, y, dy=True)

    def tail_bound(self, margin) -> float:
        """Upper bound for ``|f|`` at distance ``>= margin`` (in x or y) outside
        the node window ``[4 pi - margin, 4 pi N + margin]``."""
        side = 2 / margin**2 + 1 / (2 * np.pi * margin)
        return float(4 * np.abs(self.tau).max() * _ROW_SUM_BOUND * side)

    def sup_norm_estimate(self, radius=None, margin=None, chunk=2048) -> SupNormEstimate:
        """Certified bracket for ``sup |f|``.

        Inside the node window the grid argument of
        :meth:`TrigPoly2D.sup_norm_estimate` applies with the box bound
        ``|d^T H d| <= (|dx| + |dy|)^2 sup|f|``; outside, the decay of
        ``phi`` gives :meth:`tail_bound`. The upper bound is also capped by
        ``4 max|tau| (5/8)^2``, valid everywhere. The grid contains every node,
        so the lower bound is at least ``max |tau|``.
        """
        if not np.abs(self.tau).max() > 0:
            return SupNormEstimate(0.0, 0.0)
        margin = 8 * np.pi if margin is None else margin
        h_max = np.sqrt(2 * SUP_ETA)  # ((h/2 + h/2) * 1)^2 / 2 <= eta
        per_cell = int(np.ceil(4 * np.pi / h_max))
        h = 4 * np.pi / per_cell
        steps = int(round(margin / h))
        start = 4 * np.pi - steps * h
        count = (self.N - 1) * per_cell + 2 * steps + 1
        pts = start + h * np.arange(count)
        G = 0.0
        Fy = fejer(pts[:, None] - self.nodes[None, :])
        tau = self.tau
        for a in range(0, count, chunk):
            Fx = fejer(pts[a : a + chunk, None] - self.nodes[None, :])
            if np.iscomplexobj(tau) and tau.imag.any():
                block = np.abs((Fx @ tau.real @ Fy.T) + 1j * (Fx @ tau.imag @ Fy.T))
            else:
                block = np.abs(Fx @ tau.real @ Fy.T)
            G = max(G, 4 * float(block.max()))
        eta = h * h / 2
        upper = max(G / (1 - eta), self.tail_bound(steps * h))
        global_bound = 4 * float(np.abs(self.tau).max()) * _ROW_SUM_BOUND**2
        return SupNormEstimate(min(upper, global_bound), G)
