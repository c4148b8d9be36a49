"""Littlewood-Paley pieces and a B^1_{inf,1} norm estimate for trigonometric
polynomials, plus the row-decomposition bound for the projective tensor norm.

Masks are tents in ``t = log2 |xi|`` with integer knots: piece ``n >= 1``
carries weight ``max(0, 1 - |t - n|)``, piece 0 carries weight 1 for
``|xi| <= 1`` and ``max(0, 1 - t)`` above. Weights sum to 1 at every
frequency, and the coefficient split is arranged so that the pieces add back
to the original coefficients exactly in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions2d import TrigPoly2D


@dataclass(frozen=True)
class LPPiece:
    n: int
    poly: TrigPoly2D
    sup_bound: float


@dataclass(frozen=True)
class LPDecomposition:
    pieces: tuple

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def reconstruct_coefs(self) -> dict:
        out = {}
        for piece in self.pieces:
            for key, c in piece.poly.coefs.items():
                out[key] = out.get(key, 0) + c
        return out


def mask_weights(r):
    """``(n, a)``: frequency radius ``r`` splits as ``1 - a`` to piece ``n`` and
    ``a`` to piece ``n + 1``."""
    if r <= 1.0:
        return 0, 0.0
    t = np.log2(r)
    n = int(np.floor(t))
    return n, float(t - n)


def _split(c: complex, a: float):
    """``(p, q)`` with ``p ~ c (1 - a)``, ``q ~ c a`` and ``p + q == c`` exactly."""
    parts = []
    for comp in (c.real, c.imag):
        p = comp * (1.0 - a)
        q = comp - p
        while p + q != comp:
            p = np.nextafter(p, 0.0)
            q = comp - p
        parts.append((p, q))
    return complex(parts[0][0], parts[1][0]), complex(parts[0][1], parts[1][1])


def piece_radius(n: int) -> float:
    return 2.0 ** (n + 1)


def lp_decompose(f: TrigPoly2D) -> LPDecomposition:
    buckets: dict = {}
    for (j, k), c in f.coefs.items():
        r = f.omega * np.hypot(j, k)
        n, a = mask_weights(r)
        if a == 0.0:
            buckets.setdefault(n, {})[(j, k)] = c
            continue
        p, q = _split(c, a)
        if p != 0:
            buckets.setdefault(n, {})[(j, k)] = p
        if q != 0:
            buckets.setdefault(n + 1, {})[(j, k)] = q
    pieces = []
    for n in sorted(buckets):
        poly = TrigPoly2D(f.omega, buckets[n])
        if not poly.coefs:
            continue
        # fixed per-piece radius keeps the grid (hence the estimate) subadditive
        bound = poly.sup_norm_estimate(radius=max(piece_radius(n), poly.band_radius)).upper
        pieces.append(LPPiece(n, poly, bound))
    return LPDecomposition(tuple(pieces))


def besov_norm_estimate(f: TrigPoly2D) -> float:
    """``sum_n 2**n * sup|f_n|`` using certified upper bounds for each piece."""
    return float(sum(2.0**piece.n * piece.sup_bound for piece in lp_decompose(f)))


def projective_tensor_bound(f: TrigPoly2D, N=None):
    """``(bound, certificate)`` for the row decomposition of ``f``.

    ``bound = sum_j sup_y |sum_k c[j, k] exp(i omega k y)|`` with the sup taken
    on the grid used by :meth:`TrigPoly2D.sup_norm_estimate`;
    ``certificate = (1 + 2N) * sup_norm_estimate(f).upper``.
    """
    deg = f.degree
    N = deg if N is None else int(N)
    if N < deg:
        raise ValueError(f"degree {N} does not cover coefficients of degree {deg}")
    if not f.coefs:
        return 0.0, 0.0
    est = f.sup_norm_estimate()
    M = f.grid_size(f.band_radius)
    C = f.to_array(deg)
    S = np.zeros((C.shape[0], M), dtype=complex)
    for kk in range(C.shape[1]):
        S[:, (kk - deg) % M] += C[:, kk]
    rows = np.fft.ifft(S, axis=1) * M
    bound = float(np.abs(rows).max(axis=1).sum())
    return bound, (1 + 2 * N) * est.upper
