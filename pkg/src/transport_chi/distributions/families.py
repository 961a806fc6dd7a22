"""Closed-form families, finite mixtures and piecewise densities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr, ndtri

from ..errors import SpecError
from ..numerics import Interval
from .base import Distribution1D

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
_LN2 = math.log(2.0)


class Gaussian(Distribution1D):
    def __init__(self, mean: float = 0.0, std: float = 1.0):
        if not (std > 0 and math.isfinite(std) and math.isfinite(mean)):
            raise SpecError(f"gaussian needs finite mean and std > 0, got ({mean}, {std})")
        self.mu = float(mean)
        self.sigma = float(std)
        super().__init__(Interval(-math.inf, math.inf), scale=self.sigma)
        self.name = f"gaussian({mean:g},{std:g})"

    def _z(self, x):
        return (x - self.mu) / self.sigma

    def _logpdf(self, x):
        z = self._z(x)
        return -0.5 * z * z - _LOG_SQRT_2PI - math.log(self.sigma)

    def _pdf(self, x):
        return np.exp(self._logpdf(x))

    def _cdf(self, x):
        return ndtr(self._z(x))

    def _sf(self, x):
        return ndtr(-self._z(x))

    def _logcdf(self, x):
        return log_ndtr(self._z(x))

    def _logsf(self, x):
        return log_ndtr(-self._z(x))

    def _quantile(self, u):
        return self.mu + self.sigma * ndtri(u)

    def _isf(self, v):
        return self.mu - self.sigma * ndtri(v)


class Laplace(Distribution1D):
    """Density ``exp(-|x - shift| / scale) / (2 scale)``."""

    def __init__(self, shift: float = 0.0, scale: float = 1.0):
        if not (scale > 0 and math.isfinite(scale) and math.isfinite(shift)):
            raise SpecError(f"laplace needs finite shift and scale > 0, got ({shift}, {scale})")
        self.m = float(shift)
        self.b = float(scale)
        super().__init__(Interval(-math.inf, math.inf), breakpoints=[self.m], scale=self.b)
        self.name = f"laplace({shift:g},{scale:g})"

    def _z(self, x):
        return (x - self.m) / self.b

    def _logpdf(self, x):
        return -np.abs(self._z(x)) - math.log(2 * self.b)

    def _pdf(self, x):
        return np.exp(self._logpdf(x))

    def _cdf(self, x):
        z = self._z(x)
        with np.errstate(over="ignore"):
            return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0)), 1 - 0.5 * np.exp(-np.maximum(z, 0)))

    def _sf(self, x):
        return self._cdf(2 * self.m - x)

    def _logcdf(self, x):
        z = self._z(x)
        return np.where(z < 0, z - _LN2, np.log1p(-0.5 * np.exp(-np.maximum(z, 0))))

    def _logsf(self, x):
        return self._logcdf(2 * self.m - x)

    def _quantile(self, u):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(u <= 0.5, self.m + self.b * np.log(2 * u),
                            self.m - self.b * np.log(2 * (1 - u)))

    def _isf(self, v):
        return 2 * self.m - self._quantile(v)


class Exponential(Distribution1D):
    def __init__(self, rate: float = 1.0):
        if not (rate > 0 and math.isfinite(rate)):
            raise SpecError(f"exponential needs rate > 0, got {rate}")
        self.rate = float(rate)
        super().__init__(Interval(0.0, math.inf), scale=1.0 / self.rate)
        self.name = f"exponential({rate:g})"

    def _logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x >= 0, math.log(self.rate) - self.rate * x, -np.inf)

    def _pdf(self, x):
        return np.exp(self._logpdf(x))

    def _cdf(self, x):
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0)), 0.0)

    def _sf(self, x):
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0)), 1.0)

    def _logsf(self, x):
        return np.where(x > 0, -self.rate * np.maximum(x, 0), 0.0)

    def _quantile(self, u):
        return -np.log1p(-u) / self.rate

    def _isf(self, v):
        return -np.log(v) / self.rate


class Uniform(Distribution1D):
    def __init__(self, lo: float = 0.0, hi: float = 1.0):
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SpecError(f"uniform needs finite lo < hi, got ({lo}, {hi})")
        self.lo = float(lo)
        self.hi = float(hi)
        super().__init__(Interval(lo, hi), scale=self.hi - self.lo)
        self.name = f"uniform({lo:g},{hi:g})"

    def _pdf(self, x):
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _quantile(self, u):
        return self.lo + u * (self.hi - self.lo)

    def _isf(self, v):
        return self.hi - v * (self.hi - self.lo)


class Mixture(Distribution1D):
    """Finite mixture ``sum_i w_i * component_i``."""

    def __init__(self, weights: Sequence[float], components: Sequence[Distribution1D]):
        w = np.asarray(weights, dtype=float)
        if len(w) != len(components) or len(w) == 0:
            raise SpecError("mixture needs one weight per component")
        if np.any(~(w > 0)) or abs(w.sum() - 1.0) > 1e-12:
            raise SpecError(f"mixture weights must be positive and sum to 1, got {w.tolist()}")
        self.weights = w / w.sum()
        self.components = list(components)
        lo = min(c.support.lo for c in components)
        hi = max(c.support.hi for c in components)
        bps = [b for c in components for b in c.breakpoints]
        positive = all(c.has_positive_density for c in components) and self._covers(lo, hi)
        super().__init__(Interval(lo, hi), breakpoints=bps, has_positive_density=positive,
                         scale=max(c.scale for c in components))
        self.has_atoms = any(c.has_atoms for c in components)
        self.name = "mixture(" + ",".join(f"{wi:g}*{c.name}" for wi, c in zip(self.weights, components)) + ")"

    def _covers(self, lo, hi) -> bool:
        ivs = sorted((c.support.lo, c.support.hi) for c in self.components)
        reach = ivs[0][1]
        for a, b in ivs[1:]:
            if a > reach:
                return False
            reach = max(reach, b)
        return True

    def _pdf(self, x):
        return sum(w * c._pdf(x) for w, c in zip(self.weights, self.components))

    def _cdf(self, x):
        return sum(w * c._cdf(x) for w, c in zip(self.weights, self.components))

    def _sf(self, x):
        return sum(w * c._sf(x) for w, c in zip(self.weights, self.components))

    def _logsum(self, fn, x):
        terms = np.stack([math.log(w) + getattr(c, fn)(x) for w, c in zip(self.weights, self.components)])
        return logsumexp(terms, axis=0)

    def _logpdf(self, x):
        return self._logsum("_logpdf", x)

    def _logcdf(self, x):
        return self._logsum("_logcdf", x)

    def _logsf(self, x):
        return self._logsum("_logsf", x)

    def _quantile(self, u):
        qs = np.stack([c._quantile(u) for c in self.components])
        return self._invert(u, upper=False, lo=qs.min(axis=0), hi=qs.max(axis=0))

    def _isf(self, v):
        qs = np.stack([c._isf(v) for c in self.components])
        return self._invert(v, upper=True, lo=qs.min(axis=0), hi=qs.max(axis=0))


@dataclass(frozen=True)
class Piece:
    """Density ``coef * exp(rate * x)`` on ``[lo, hi)``; ``rate = 0`` is a constant."""

    lo: float
    hi: float
    coef: float
    rate: float = 0.0

    def mass_between(self, a, b):
        """Mass of the piece on ``[a, b]`` for ``lo <= a <= b <= hi`` (vectorized)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.rate == 0.0:
            width = np.where(b > a, b - a, 0.0)
            return self.coef * width
        r = self.rate
        # coef/r * (e^{rb} - e^{ra}) arranged to avoid inf-inf and cancellation
        with np.errstate(over="ignore", invalid="ignore"):
            if r > 0:
                out = self.coef / r * np.exp(r * b) * -np.expm1(r * (a - b))
            else:
                out = self.coef / -r * np.exp(r * a) * -np.expm1(r * (b - a))
        return np.where(b > a, out, 0.0)

    @property
    def mass(self) -> float:
        return float(self.mass_between(self.lo, self.hi))


class Piecewise(Distribution1D):
    """Density made of exponential/constant pieces on disjoint ordered intervals.

    Gaps between pieces carry zero density. CDF and survival function are
    accumulated analytically piece by piece from the left and from the right
    respectively.
    """

    def __init__(self, pieces: Sequence[Piece], *, mass_tol: float = 1e-9, name: str = "piecewise",
                 metadata: dict | None = None):
        pieces = sorted(pieces, key=lambda p: p.lo)
        if not pieces:
            raise SpecError("piecewise density needs at least one piece")
        for p in pieces:
            if not p.lo < p.hi:
                raise SpecError(f"empty piece [{p.lo}, {p.hi})")
            if p.coef < 0:
                raise SpecError("piece densities must be nonnegative")
            if p.rate > 0 and math.isinf(p.hi) and p.coef > 0:
                raise SpecError("increasing exponential piece on an unbounded right interval")
            if p.rate < 0 and math.isinf(p.lo) and p.coef > 0:
                raise SpecError("decreasing exponential piece on an unbounded left interval")
            if p.rate == 0 and not (math.isfinite(p.lo) and math.isfinite(p.hi)) and p.coef > 0:
                raise SpecError("constant piece on an unbounded interval")
        for p, q in zip(pieces[:-1], pieces[1:]):
            if q.lo < p.hi:
                raise SpecError("pieces overlap")
        self.pieces = [p for p in pieces if p.coef > 0]
        masses = np.array([p.mass for p in self.pieces])
        total = float(masses.sum())
        if not abs(total - 1.0) <= mass_tol:
            raise SpecError(f"piecewise density has total mass {total!r}, expected 1")
        self._lo = np.array([p.lo for p in self.pieces])
        self._hi = np.array([p.hi for p in self.pieces])
        contiguous = all(a.hi == b.lo for a, b in zip(self.pieces[:-1], self.pieces[1:]))
        bps = [v for p in self.pieces for v in (p.lo, p.hi)]
        finite_w = [p.hi - p.lo for p in self.pieces if math.isfinite(p.hi - p.lo)]
        scale = max([1.0 / abs(p.rate) for p in self.pieces if p.rate != 0] + finite_w + [1e-300])
        super().__init__(Interval(self.pieces[0].lo, self.pieces[-1].hi), breakpoints=bps,
                         has_positive_density=contiguous, scale=min(scale, 1e6), metadata=metadata)
        self.total_mass = total
        self.name = name

    def _logpdf(self, x):
        out = np.full(x.shape, -np.inf)
        idx = np.searchsorted(self._hi, x, side="right")
        valid = idx < len(self.pieces)
        idx_c = np.minimum(idx, len(self.pieces) - 1)
        inside = valid & (x >= self._lo[idx_c])
        coefs = np.array([p.coef for p in self.pieces])
        rates = np.array([p.rate for p in self.pieces])
        with np.errstate(divide="ignore"):
            vals = np.log(coefs[idx_c]) + rates[idx_c] * x
        return np.where(inside, vals, out)

    def _pdf(self, x):
        return np.exp(self._logpdf(x))

    def _cdf(self, x):
        total = np.zeros(x.shape)
        for p in self.pieces:
            total = total + p.mass_between(p.lo, np.clip(x, p.lo, p.hi))
        return np.minimum(total, 1.0)

    def _sf(self, x):
        total = np.zeros(x.shape)
        for p in self.pieces:
            total = total + p.mass_between(np.clip(x, p.lo, p.hi), p.hi)
        return np.minimum(total, 1.0)
