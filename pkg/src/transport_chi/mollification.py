"""Gaussian mollification ``mu_n = rho_n * mu`` and the contraction checks.

``rho_n`` is the centered normal density with variance ``1/n``. Gaussians
(and mixtures of them) are mollified in closed form. Any other law with a
density is first replaced by a fine discrete measure: composite
Gauss-Legendre nodes on panels no wider than half the kernel width, aligned
with the law's breakpoints and running far enough out that the neglected
mass is below ``TAIL_MASS``. The convolution of that discrete measure with
``rho_n`` is an explicit Gaussian mixture, evaluated in log space using
only atoms within ``BAND`` kernel widths of each point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, logsumexp

from .distributions import Distribution1D, Gaussian, Mixture
from .divergences import chi_square_sq
from .errors import DomainError
from .numerics import DEFAULT_SETTINGS, Interval, QuadSettings, composite_gauss_legendre
from .reports import InequalityReport
from .transport import wq_quantile

TAIL_MASS = 1e-280
BAND = 20.0
GL_ORDER = 8
_CHUNK = 4_000_000
_TABLE_TAIL = 1e-30
_MAX_TABLE = 20_000
_NEWTON_ITERS = 100


@dataclass(frozen=True)
class Mollifier:
    """Centered Gaussian kernel with inverse variance ``n``."""

    n: float

    def __post_init__(self):
        if not (self.n > 0 and math.isfinite(self.n)):
            raise DomainError(f"mollifier parameter must be positive, got {self.n}")

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(self.n)

    @property
    def variance(self) -> float:
        return 1.0 / self.n

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(self.n / (2 * math.pi)) * np.exp(-0.5 * self.n * x * x)


class Mollified(Distribution1D):
    """``rho_n * mu`` for a law ``mu`` with a density, as a Gaussian mixture."""

    def __init__(self, base: Distribution1D, n: float, s: QuadSettings = DEFAULT_SETTINGS):
        if base.has_atoms:
            raise DomainError("mollification is implemented for laws with a density")
        self.kernel = Mollifier(float(n))
        self.base = base
        self.n = float(n)
        sigma = self.kernel.sigma
        self.sigma = sigma
        lo, hi = base.support
        if not math.isfinite(lo):
            lo = float(base.quantile(TAIL_MASS))
        if not math.isfinite(hi):
            hi = float(base.isf(TAIL_MASS))
        edges = [lo] + [b for b in base.breakpoints if lo < b < hi] + [hi]
        width = min(0.5 * sigma, (hi - lo) / 256.0)
        y, w = composite_gauss_legendre(edges, width, GL_ORDER)
        with np.errstate(divide="ignore"):
            lw = np.log(w) + base._logpdf(y)
        keep = np.isfinite(lw)
        self.atoms = y[keep]
        self.log_weights = lw[keep] - logsumexp(lw[keep])
        acc = np.logaddexp.accumulate(self.log_weights)
        self._prefix = np.concatenate([[-np.inf], acc])
        racc = np.logaddexp.accumulate(self.log_weights[::-1])[::-1]
        self._suffix = np.concatenate([racc, [-np.inf]])
        super().__init__(Interval(-math.inf, math.inf), has_positive_density=True,
                         scale=base.scale + sigma)
        self.name = f"mollified({base.name},{self.n:g})"
        # past the outermost atoms the mixture tail is the kernel's, not the law's
        self._reliable = Interval(float(self.atoms[0]), float(self.atoms[-1]))
        self._build_table()

    @property
    def reliable(self) -> Interval:
        return self._reliable

    # -- mixture evaluation ---------------------------------------------

    def _bands(self, x):
        y = self.atoms
        reach = BAND * self.sigma
        i0 = np.minimum(np.searchsorted(y, x - reach, side="left"), y.size - 1)
        i1 = np.maximum(np.searchsorted(y, x + reach, side="right"), i0 + 1)
        return i0, i1

    def _banded(self, x, term, outside=None):
        """``logsumexp`` over band atoms of ``log w_j + term(sqrt(n)(x - y_j))``.

        ``outside(i0, i1)`` supplies the log-mass of atoms left out of the
        band that count fully (used by the CDF and survival function).
        """
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        i0, i1 = self._bands(x)
        width = int(np.max(i1 - i0)) if x.size else 0
        step = max(1, _CHUNK // max(width, 1))
        rn = math.sqrt(self.n)
        offs = np.arange(width)
        for start in range(0, x.size, step):
            sl = slice(start, start + step)
            idx = i0[sl, None] + offs[None, :]
            valid = idx < i1[sl, None]
            idx = np.minimum(idx, self.atoms.size - 1)
            z = rn * (x[sl, None] - self.atoms[idx])
            with np.errstate(over="ignore", invalid="ignore"):
                t = np.where(valid, self.log_weights[idx] + term(z), -np.inf)
            if outside is not None:
                t = np.concatenate([t, outside(i0[sl], i1[sl])[:, None]], axis=1)
            out[sl] = logsumexp(t, axis=1)
        return out

    def _logpdf(self, x):
        return self._banded(x, lambda z: -0.5 * z * z) + 0.5 * math.log(self.n / (2 * math.pi))

    def _pdf(self, x):
        return np.exp(self._logpdf(x))

    def _logcdf(self, x):
        return self._banded(x, log_ndtr, lambda i0, i1: self._prefix[i0])

    def _logsf(self, x):
        return self._banded(x, lambda z: log_ndtr(-z), lambda i0, i1: self._suffix[i1])

    def _cdf(self, x):
        return np.exp(self._logcdf(x))

    def _sf(self, x):
        return np.exp(self._logsf(x))

    # -- quantiles: table bracket plus safeguarded Newton in log space ---

    def _build_table(self):
        lo = float(self.base.quantile(_TABLE_TAIL)) - 10 * self.sigma
        hi = float(self.base.isf(_TABLE_TAIL)) + 10 * self.sigma
        if math.isfinite(self.base.support.lo):
            lo = min(lo, self.base.support.lo - 10 * self.sigma)
        if math.isfinite(self.base.support.hi):
            hi = max(hi, self.base.support.hi + 10 * self.sigma)
        num = int(min(_MAX_TABLE, max(512, math.ceil((hi - lo) / (0.5 * self.sigma))))) + 1
        self._tx = np.linspace(lo, hi, num)
        self._tlc = self._logcdf(self._tx)
        self._tls = self._logsf(self._tx)

    def _solve(self, logt, upper: bool):
        tx = self._tx
        if upper:
            # logsf decreases along the table; search on its negation
            k = np.searchsorted(-self._tls, -logt, side="left")
        else:
            k = np.searchsorted(self._tlc, logt, side="left")
        a = tx[np.clip(k - 1, 0, tx.size - 1)].copy()
        b = tx[np.clip(k, 0, tx.size - 1)].copy()
        # extend the bracket when the level lies beyond the table
        span = tx[-1] - tx[0]
        left_out = k == 0
        right_out = k >= tx.size
        fn = self._logsf if upper else self._logcdf
        for _ in range(200):
            if not (left_out.any() or right_out.any()):
                break
            if left_out.any():
                a = np.where(left_out, a - span, a)
                va = fn(a)
                left_out &= (va < logt) if upper else (va > logt)
            if right_out.any():
                b = np.where(right_out, b + span, b)
                vb = fn(b)
                right_out &= (vb > logt) if upper else (vb < logt)
        x = 0.5 * (a + b)
        active = np.ones(x.shape, dtype=bool)
        for _ in range(_NEWTON_ITERS):
            if not active.any():
                break
            xa = x[active]
            g = fn(xa) - logt[active]
            lp = self._logpdf(xa)
            with np.errstate(over="ignore", invalid="ignore"):
                slope = np.exp(lp - fn(xa))
            slope = -slope if upper else slope
            below = (g > 0) if upper else (g < 0)
            aa = np.where(below, xa, a[active])
            bb = np.where(below, b[active], xa)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = xa - g / slope
            bad = ~np.isfinite(xn) | (xn <= aa) | (xn >= bb)
            xn = np.where(bad, 0.5 * (aa + bb), xn)
            done = (np.abs(xn - xa) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xa))) | (g == 0)
            done |= (bb - aa) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xa))
            a[active], b[active] = aa, bb
            x[active] = np.where(g == 0, xa, xn)
            idx = np.flatnonzero(active)
            active[idx[done]] = False
        return x

    def _quantile(self, u):
        with np.errstate(divide="ignore"):
            return self._solve(np.log(u), upper=False)

    def _isf(self, v):
        with np.errstate(divide="ignore"):
            return self._solve(np.log(v), upper=True)


def mollify(d: Distribution1D, n: float, s: QuadSettings = DEFAULT_SETTINGS,
            exact: bool = True) -> Distribution1D:
    """The law ``rho_n * d``.

    With ``exact`` (the default) Gaussians map to Gaussians and mixtures are
    mollified component-wise; everything else goes through :class:`Mollified`.
    """
    kernel = Mollifier(float(n))
    if exact and isinstance(d, Gaussian):
        return Gaussian(d.mu, math.hypot(d.sigma, kernel.sigma))
    if exact and isinstance(d, Mixture):
        return Mixture(d.weights, [mollify(c, n, s) for c in d.components])
    return Mollified(d, n, s)


def _pair(mu, nu, n, s, mollified):
    return mollified if mollified is not None else (mollify(mu, n, s), mollify(nu, n, s))


def check_w2_contraction(mu: Distribution1D, nu: Distribution1D, n: float,
                         s: QuadSettings = DEFAULT_SETTINGS, label: str = "",
                         mollified=None) -> InequalityReport:
    """``W_2(mu_n, nu_n) <= W_2(mu, nu)``; ``mollified`` may pass a prebuilt ``(mu_n, nu_n)``."""
    mu_n, nu_n = _pair(mu, nu, n, s, mollified)
    w = wq_quantile(mu, nu, 2, s).value
    wn = wq_quantile(mu_n, nu_n, 2, s).value
    return InequalityReport("w2_contraction", wn, w, 1.0, "W2(mu_n,nu_n)", "W2(mu,nu)",
                            label=label, details={"n": n}, settings=s.as_dict())


def check_chi_contraction(mu: Distribution1D, nu: Distribution1D, n: float,
                          s: QuadSettings = DEFAULT_SETTINGS, label: str = "",
                          mollified=None) -> InequalityReport:
    """``chi_2^2(nu_n | mu_n) <= chi_2^2(nu | mu)``."""
    mu_n, nu_n = _pair(mu, nu, n, s, mollified)
    c = chi_square_sq(nu, mu, s).value
    cn = chi_square_sq(nu_n, mu_n, s).value
    return InequalityReport("chi_contraction", cn, c, 1.0, "chi2(nu_n|mu_n)", "chi2(nu|mu)",
                            label=label, details={"n": n}, settings=s.as_dict())


def contraction_sweep(mu: Distribution1D, nu: Distribution1D, ns=(1, 10, 100),
                      s: QuadSettings = DEFAULT_SETTINGS, label: str = "") -> list[InequalityReport]:
    """Both contraction checks for every ``n``, plus one report per quantity
    saying whether the mollified values are nondecreasing in ``n``."""
    reports = []
    for n in ns:
        pair = (mollify(mu, n, s), mollify(nu, n, s))
        reports.append(check_w2_contraction(mu, nu, n, s, label, pair))
        reports.append(check_chi_contraction(mu, nu, n, s, label, pair))
    for check in ("w2_contraction", "chi_contraction"):
        vals = [r.lhs for r in reports if r.check == check]
        limit = next(r.rhs for r in reports if r.check == check)
        drops = [max(0.0, a - b) for a, b in zip(vals[:-1], vals[1:])]
        worst = max(drops, default=0.0)
        reports.append(InequalityReport(check.replace("contraction", "monotone_in_n"), worst, 0.0, 0.0,
                                        "largest decrease along n", "0", label=label,
                                        tol=1e-6 * (1 + abs(limit)),
                                        details={"ns": list(ns), "values": vals, "limit": limit,
                                                 "gap_at_largest_n": limit - vals[-1]},
                                        settings=s.as_dict()))
    return reports
