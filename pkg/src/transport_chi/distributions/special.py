"""The two constructed laws: the g_n counterexample and the truncated CDF."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..numerics import Interval
from .base import Distribution1D
from .families import Piece, Piecewise

GN_C = (math.e - 1.0) / 2.0
GN_SERIES_TOL = 1e-12
_ATOM_FLOOR = 1e-14


def gn_knot(k: int) -> float:
    """Left end ``x_k`` of the k-th displaced band; lies in ``(k, k+1)``.

    ``exp(-x/2)/2`` on ``[x_k, k+1)`` carries the same mass as the Laplace
    density on ``[k, k+1)``.
    """
    return k + 1 - 2.0 * math.log1p(GN_C * math.exp(-(k + 1) / 2.0))


def gn_chi_square_series(n: int, terms: int = 400) -> float:
    """``2 sum_{k>=n} log(1 + c e^{-(k+1)/2}) - e^{-n}`` summed to ``terms`` terms."""
    ks = np.arange(n, n + terms, dtype=float)
    return float(2.0 * np.sum(np.log1p(GN_C * np.exp(-(ks + 1) / 2.0))[::-1]) - math.exp(-n))


def _gn_last_band(n: int, tol: float) -> int:
    # the chi-square series tail past K is at most 2c e^{-(K+2)/2} / (1 - e^{-1/2})
    k = n
    while 2 * GN_C * math.exp(-(k + 2) / 2.0) / (1 - math.exp(-0.5)) >= tol:
        k += 1
    return k


def make_gn(n: int, series_tol: float = GN_SERIES_TOL) -> Piecewise:
    """Symmetric density equal to the Laplace density for ``|x| < n`` and
    moved to ``exp(-|x|/2)/2`` on ``[x_k, k+1)`` for every band ``k >= n``.

    The infinite family of bands is cut at the band ``K`` past which the
    chi-square series tail drops below ``series_tol``; beyond ``K + 1`` the
    Laplace density itself is used. Every band keeps its Laplace mass, so
    the total mass is exactly one; the neglected chi-square contribution is
    stored in ``metadata["chi_sq_deficit"]``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"g_n needs an integer n >= 1, got {n}")
    n = int(n)
    last = _gn_last_band(n, series_tol)
    right = [Piece(0.0, float(n), 0.5, -1.0)]
    knots = []
    for k in range(n, last + 1):
        xk = gn_knot(k)
        knots.append(xk)
        right.append(Piece(xk, float(k + 1), 0.5, -0.5))
    right.append(Piece(float(last + 1), math.inf, 0.5, -1.0))
    left = [Piece(-p.hi, -p.lo, p.coef, -p.rate) for p in right]
    ks = np.arange(last + 1, last + 400, dtype=float)
    deficit = float(2.0 * np.sum(np.log1p(GN_C * np.exp(-(ks + 1) / 2.0))[::-1]) - math.exp(-(last + 1)))
    meta = {"n": n, "last_band": last, "knots": knots, "mass_deficit": 0.0, "chi_sq_deficit": deficit}
    d = Piecewise(left + right, name=f"gn_example({n})", metadata=meta)
    d.scale = 1.0
    return d


class TruncatedCDF(Distribution1D):
    """Law whose CDF follows ``target`` in its central band and ``ref`` outside.

    With ``a = G^{-1}(1/n)`` and ``b = G^{-1}((n-1)/n)``::

        G_n(x) = min(F(x), 1/n)        for x < a
               = G(x)                  for a <= x < b
               = max(F(x), (n-1)/n)    for x >= b

    The result may carry atoms at ``a`` and ``b``.
    """

    def __init__(self, target: Distribution1D, ref: Distribution1D, n: int):
        if int(n) != n or n < 2:
            raise DomainError(f"truncation level needs an integer n >= 2, got {n}")
        self.n = int(n)
        self.target = target
        self.ref = ref
        self.p = 1.0 / self.n
        self.a = float(target.quantile(self.p))
        self.b = float(target.isf(self.p))
        lo = min(ref.support.lo, self.a)
        hi = max(ref.support.hi, self.b)
        bps = [self.a, self.b] + [x for x in ref.breakpoints + target.breakpoints]
        super().__init__(Interval(lo, hi), breakpoints=bps, has_positive_density=False,
                         scale=max(ref.scale, target.scale))
        # atoms: jump of G_n at a and at b
        below_b = np.nextafter(self.b, -math.inf)
        if self.a < self.b:
            g_left_b = float(target.cdf(below_b))
        else:
            g_left_b = min(float(ref.cdf(below_b)), self.p)
        self.atom_a = float(target.cdf(self.a)) - min(float(ref.cdf(self.a)), self.p) \
            if self.a < self.b else 0.0
        self.atom_b = max(float(ref.cdf(self.b)), 1.0 - self.p) - g_left_b
        # jumps of a few ulps are rounding in F(Q(p)), not atoms
        if self.atom_a <= _ATOM_FLOOR:
            self.atom_a = 0.0
        if self.atom_b <= _ATOM_FLOOR:
            self.atom_b = 0.0
        self.has_atoms = self.atom_a > 0 or self.atom_b > 0
        self.name = f"truncated({target.name}|{ref.name},{self.n})"

    def _cdf(self, x):
        F = self.ref._cdf(x)
        G = self.target._cdf(x)
        return np.where(x < self.a, np.minimum(F, self.p),
                        np.where(x < self.b, G, np.maximum(F, 1.0 - self.p)))

    def _sf(self, x):
        SF = self.ref._sf(x)
        SG = self.target._sf(x)
        return np.where(x < self.a, np.maximum(SF, 1.0 - self.p),
                        np.where(x < self.b, SG, np.minimum(SF, self.p)))

    def _pdf(self, x):
        """Density of the absolutely continuous part (atoms excluded)."""
        F = self.ref._cdf(x)
        f = self.ref._pdf(x)
        g = self.target._pdf(x)
        return np.where(x < self.a, np.where(F < self.p, f, 0.0),
                        np.where(x < self.b, g, np.where(F > 1.0 - self.p, f, 0.0)))

    def _quantile(self, u):
        # inverse of G_n read off band by band
        q_ref = self.ref._quantile(u)
        q_tgt = self.target._quantile(u)
        return np.where(u <= self.p, np.minimum(q_ref, self.a),
                        np.where(u <= 1.0 - self.p, q_tgt, np.maximum(q_ref, self.b)))

    def _isf(self, v):
        q_ref = self.ref._isf(v)
        q_tgt = self.target._isf(v)
        return np.where(v < self.p, np.maximum(q_ref, self.b),
                        np.where(v < 1.0 - self.p, q_tgt, np.minimum(q_ref, self.a)))

    def u_breakpoints(self):
        lower = {self.p}
        upper = {self.p}
        fa = float(self.ref.cdf(self.a))
        if 0 < fa < self.p:
            lower.add(fa)
        sb = float(self.ref.sf(self.b))
        if 0 < sb < self.p:
            upper.add(sb)
        rl, ru = self.ref.u_breakpoints()
        tl, tu = self.target.u_breakpoints()
        lower.update(v for v in rl + tl if v < 0.5)
        upper.update(v for v in ru + tu if v < 0.5)
        return sorted(v for v in lower if v < 0.5), sorted(v for v in upper if v < 0.5)


def truncate_cdf(target: Distribution1D, ref: Distribution1D, n: int) -> TruncatedCDF:
    return TruncatedCDF(target, ref, n)
