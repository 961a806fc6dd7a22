"""Common interface for one-dimensional probability laws."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import DomainError
from ..numerics import DEFAULT_SETTINGS, Interval, QuadSettings, integrate

_MAX_BISECT = 2200


def _out(x_in, y):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(x_in) == 0:
        return float(y)
    return y


def log_abs_diff(la, lb):
    """``log|exp(la) - exp(lb)|`` without forming the exponentials."""
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    hi = np.maximum(la, lb)
    lo = np.minimum(la, lb)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = hi + np.log(-np.expm1(lo - hi))
    out = np.where(np.isneginf(lo), hi, out)
    out = np.where(np.isneginf(hi), -np.inf, out)
    return out


class Distribution1D:
    """A one-dimensional law given through density, CDF and quantiles.

    Subclasses implement ``_pdf``, ``_cdf`` and ``_sf`` on float arrays and
    may override the log versions and the inverses for accuracy. ``sf`` is
    kept separate from ``1 - cdf`` so that right tails keep full relative
    precision.

    ``breakpoints`` lists the finite points where the density is not smooth
    (support ends, kinks, jumps); quadrature never straddles them.
    """

    name = "distribution"
    has_atoms = False

    def __init__(self, support: Interval, *, breakpoints: Sequence[float] = (),
                 has_positive_density: bool = True, scale: float = 1.0,
                 metadata: dict | None = None):
        self.support = support
        bps = set(float(b) for b in breakpoints if math.isfinite(b))
        bps.update(v for v in (support.lo, support.hi) if math.isfinite(v))
        self.breakpoints = tuple(sorted(bps))
        self.has_positive_density = bool(has_positive_density)
        self.scale = float(scale)
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    # -- evaluation ------------------------------------------------------

    def pdf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._pdf(np.atleast_1d(xa)).reshape(xa.shape))

    def logpdf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._logpdf(np.atleast_1d(xa)).reshape(xa.shape))

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._cdf(np.atleast_1d(xa)).reshape(xa.shape))

    def sf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._sf(np.atleast_1d(xa)).reshape(xa.shape))

    def logcdf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._logcdf(np.atleast_1d(xa)).reshape(xa.shape))

    def logsf(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._logsf(np.atleast_1d(xa)).reshape(xa.shape))

    def quantile(self, u):
        """Left-continuous pseudo-inverse ``inf{x : F(x) >= u}``."""
        ua = np.asarray(u, dtype=float)
        if np.any(~((ua > 0) & (ua < 1))):
            raise DomainError("quantile level must lie in (0, 1)")
        return _out(u, self._quantile(np.atleast_1d(ua)).reshape(ua.shape))

    def isf(self, v):
        """Upper quantile ``inf{x : P(X > x) <= v}``, i.e. ``quantile(1 - v)``.

        Working with ``v`` directly keeps full precision deep in the right
        tail, where ``1 - v`` would round to one.
        """
        va = np.asarray(v, dtype=float)
        if np.any(~((va > 0) & (va < 1))):
            raise DomainError("tail level must lie in (0, 1)")
        return _out(v, self._isf(np.atleast_1d(va)).reshape(va.shape))

    # -- defaults --------------------------------------------------------

    def _logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._pdf(x))

    def _logcdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._cdf(x))

    def _logsf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._sf(x))

    def _center(self) -> float:
        lo, hi = self.support
        if math.isfinite(lo) and math.isfinite(hi):
            return 0.5 * (lo + hi)
        if math.isfinite(lo):
            return lo + self.scale
        if math.isfinite(hi):
            return hi - self.scale
        return 0.0

    def _bracket(self, target, upper: bool):
        lo_s, hi_s = self.support
        c = self._center()
        n = target.size
        lo = np.full(n, lo_s if math.isfinite(lo_s) else c - self.scale)
        hi = np.full(n, hi_s if math.isfinite(hi_s) else c + self.scale)
        # expand until the level is bracketed
        for _ in range(2100):
            if upper:
                need_lo = self._sf(lo) <= target
                need_hi = self._sf(hi) > target
            else:
                need_lo = self._cdf(lo) >= target
                need_hi = self._cdf(hi) < target
            if math.isfinite(lo_s):
                need_lo &= lo > lo_s
            if math.isfinite(hi_s):
                need_hi &= False
            if not (need_lo.any() or need_hi.any()):
                break
            lo = np.where(need_lo, c - 2.0 * (c - lo) - self.scale, lo)
            hi = np.where(need_hi, c + 2.0 * (hi - c) + self.scale, hi)
        return lo, hi

    def _invert(self, target, upper: bool, lo=None, hi=None):
        """Vectorized bisection for the pseudo-inverse.

        Lower inverse: smallest ``x`` with ``cdf(x) >= u``. Upper inverse:
        smallest ``x`` with ``sf(x) <= v``. The invariant keeps ``hi`` on the
        accepting side, so the returned value always satisfies the defining
        inequality.
        """
        target = np.asarray(target, dtype=float)
        if lo is None or hi is None:
            lo, hi = self._bracket(target, upper)
        lo = np.array(lo, dtype=float)
        hi = np.array(hi, dtype=float)
        # the support's lower end may itself satisfy the condition
        at_lo = (self._sf(lo) <= target) if upper else (self._cdf(lo) >= target)
        for _ in range(_MAX_BISECT):
            mid = 0.5 * (lo + hi)
            active = (mid > lo) & (mid < hi) & ~at_lo
            if not active.any():
                break
            ok = (self._sf(mid) <= target) if upper else (self._cdf(mid) >= target)
            hi = np.where(active & ok, mid, hi)
            lo = np.where(active & ~ok, mid, lo)
        return np.where(at_lo, lo, hi)

    def _quantile(self, u):
        return self._invert(u, upper=False)

    def _isf(self, v):
        return self._invert(v, upper=True)

    # -- derived quantities ---------------------------------------------

    def median(self) -> float:
        return self.quantile(0.5)

    @property
    def reliable(self) -> Interval:
        """Region where density ratios of this law are trustworthy.

        The support for exact laws; approximations may report less.
        """
        return self.support

    def window(self, trunc_q: float) -> tuple[float, float]:
        """Finite interval carrying all but ``2*trunc_q`` of the mass."""
        lo, hi = self.support
        if not math.isfinite(lo):
            lo = self.quantile(trunc_q)
        if not math.isfinite(hi):
            hi = self.isf(trunc_q)
        return float(lo), float(hi)

    def u_breakpoints(self) -> tuple[list[float], list[float]]:
        """Levels in quantile space where ``quantile``/``isf`` are not smooth.

        Returns ``(lower, upper)``: ``cdf`` values below 1/2 and ``sf``
        values below 1/2 at the breakpoints.
        """
        bps = np.array(self.breakpoints, dtype=float)
        if bps.size == 0:
            return [], []
        cu = self._cdf(bps)
        sv = self._sf(bps)
        lower = sorted(float(c) for c in cu if 0 < c < 0.5)
        upper = sorted(float(v) for v in sv if 0 < v < 0.5)
        return lower, upper

    def expect(self, fn, s: QuadSettings = DEFAULT_SETTINGS) -> float:
        """``E[fn(X)]`` by quadrature against the density (or quantiles)."""
        if self.has_atoms:
            lower, upper = self.u_breakpoints()
            a = integrate(lambda u: fn(self._quantile(u)), (0.0, 0.5), s, breakpoints=lower)
            b = integrate(lambda v: fn(self._isf(v)), (0.0, 0.5), s, breakpoints=upper)
            return a + b
        return integrate(lambda x: _safe_prod(fn(x), self._pdf(x)), self.support, s,
                         breakpoints=self.breakpoints, scale=self.scale)

    def mean(self, s: QuadSettings = DEFAULT_SETTINGS) -> float:
        return self.expect(lambda x: x, s)

    def central_moment(self, k: int, s: QuadSettings = DEFAULT_SETTINGS) -> float:
        m = self.mean(s)
        return self.expect(lambda x: (x - m) ** k, s)

    def variance(self, s: QuadSettings = DEFAULT_SETTINGS) -> float:
        return self.central_moment(2, s)


def _safe_prod(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = a * b
    return np.where(b == 0.0, 0.0, out)


class AffineTransformed(Distribution1D):
    """Law of ``loc + scale * X`` for ``X`` distributed as ``base``."""

    def __init__(self, base: Distribution1D, loc: float = 0.0, scale: float = 1.0):
        if not scale > 0:
            raise DomainError("affine scale must be positive")
        self.base = base
        self.loc = float(loc)
        self.factor = float(scale)
        lo, hi = base.support
        super().__init__(
            Interval(self.loc + self.factor * lo, self.loc + self.factor * hi),
            breakpoints=[self.loc + self.factor * b for b in base.breakpoints],
            has_positive_density=base.has_positive_density,
            scale=base.scale * self.factor,
        )
        self.has_atoms = base.has_atoms
        self.name = f"{base.name}*{self.factor:g}+{self.loc:g}"

    def _z(self, x):
        return (x - self.loc) / self.factor

    def _pdf(self, x):
        return self.base._pdf(self._z(x)) / self.factor

    def _logpdf(self, x):
        return self.base._logpdf(self._z(x)) - math.log(self.factor)

    def _cdf(self, x):
        return self.base._cdf(self._z(x))

    def _sf(self, x):
        return self.base._sf(self._z(x))

    def _logcdf(self, x):
        return self.base._logcdf(self._z(x))

    def _logsf(self, x):
        return self.base._logsf(self._z(x))

    def _quantile(self, u):
        return self.loc + self.factor * self.base._quantile(u)

    def _isf(self, v):
        return self.loc + self.factor * self.base._isf(v)

    def u_breakpoints(self):
        return self.base.u_breakpoints()


def shifted(d: Distribution1D, m: float) -> Distribution1D:
    return AffineTransformed(d, loc=m, scale=1.0)


def scaled(d: Distribution1D, lam: float) -> Distribution1D:
    """Image of ``d`` under ``x -> lam * x``."""
    return AffineTransformed(d, loc=0.0, scale=lam)
