"""Muckenhoupt constant, the ``(F - G)^2 / f`` functional and the chain

    W_2^2  <=  4 int (F - G)^2 / f  <=  16 b chi_2^2

together with the constants linking Poincare and transport-chi-square
inequalities and the two counterexamples showing the links cannot be
reversed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import Distribution1D, Laplace, make_gn, gn_chi_square_series
from .divergences import chi_square_sq
from .errors import AccuracyError, DomainError, EvaluationError, PositivityError
from .numerics import (DEFAULT_SETTINGS, DIVERGENCE_CAP, QuadSettings, gauss_kronrod,
                       integrate, integrate_with_error)
from .reports import InequalityReport
from .transport import abs_cdf_difference, wq_quantile

UNIFORM_POINTS = 600
GEOMETRIC_POINTS = 120
MONOTONE_TAIL = 10


@dataclass(frozen=True)
class MuckenhouptResult:
    """Two-branch supremum defining ``b``.

    ``right_arg``/``left_arg`` are ``+inf``/``-inf`` when the branch supremum
    is only approached at infinity (the ``*_at_infinity`` flags say the
    same); the branch value is then an extrapolated limit.
    """

    b: float
    right_sup: float
    left_sup: float
    right_arg: float
    left_arg: float
    median: float
    right_at_infinity: bool = False
    left_at_infinity: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class _Branch:
    sup: float
    arg: float
    at_infinity: bool


def _inv_density(mu: Distribution1D):
    def h(y):
        lf = mu._logpdf(y)
        if np.any(np.isneginf(lf)):
            bad = np.asarray(y)[np.isneginf(lf)][0]
            raise PositivityError(f"density vanishes at x={bad!r} inside the support")
        with np.errstate(over="ignore"):
            return np.exp(-lf)
    return h


def _cell_integrals(h, xs, s: QuadSettings):
    """``int_{xs[i]}^{xs[i+1]} h`` for every cell; cells failing the fixed rule go adaptive."""
    a, b = xs[:-1], xs[1:]
    val, err = gauss_kronrod(h, a, b)
    bad = ~(err <= np.maximum(s.abs_tol * 1e-3, s.rel_tol * 1e-2 * np.abs(val)))
    for i in np.flatnonzero(bad):
        val[i] = integrate(h, (a[i], b[i]), s)
    return val


def _aitken(seq) -> float | None:
    x0, x1, x2 = seq
    d1, d2 = x1 - x0, x2 - x1
    den = d2 - d1
    if not den < 0 or d2 < 0:
        return None
    return x2 - d2 * d2 / den


def _branch(mu: Distribution1D, m: float, side: int, s: QuadSettings) -> _Branch:
    """Supremum of ``tail(x) * |int_m^x 1/f|`` moving away from the median."""
    h = _inv_density(mu)
    ratio = (2.0 * s.trunc_q) ** (1.0 / GEOMETRIC_POINTS)
    levels = 0.5 * ratio ** np.arange(1, GEOMETRIC_POINTS + 1)
    if side > 0:
        end = mu.support.hi
        geo = mu._isf(levels) if not math.isfinite(end) else np.array([])
        end = end if math.isfinite(end) else float(geo[-1])
        tail = mu._sf
    else:
        end = mu.support.lo
        geo = mu._quantile(levels) if not math.isfinite(end) else np.array([])
        end = end if math.isfinite(end) else float(geo[-1])
        tail = mu._cdf
    if end == m:
        return _Branch(0.0, m, False)
    uni = np.linspace(m, end, UNIFORM_POINTS)
    inner_bps = [b for b in mu.breakpoints if min(m, end) < b < max(m, end)]
    xs = np.unique(np.concatenate([uni, geo, inner_bps]))
    if side < 0:
        xs = xs[::-1]
    cells = np.abs(_cell_integrals(h, np.sort(xs), s))
    if side < 0:
        cells = cells[::-1]
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    phi = tail(xs) * cum

    def phi_at(x):
        # value between grid neighbours, starting from the cumulative sum at i0
        i0 = int(np.searchsorted(xs, x, side="right") - 1) if side > 0 else \
            int(np.searchsorted(-xs, -x, side="right") - 1)
        i0 = min(max(i0, 0), xs.size - 1)
        lo, hi = sorted((xs[i0], x))
        extra = integrate(h, (lo, hi), s) if hi > lo else 0.0
        return float(tail(np.array([x]))[0]) * (cum[i0] + extra)

    i_star = int(np.argmax(phi))
    last = phi[-MONOTONE_TAIL:]
    increasing = i_star == phi.size - 1 and np.all(np.diff(last) > 0)
    unbounded = geo.size > 0
    if increasing and unbounded:
        geo_phi = tail(geo) * np.interp(np.abs(geo - m), np.abs(xs - m), cum)
        top = float(phi[-1])
        step = geo_phi[-1] - geo_phi[-2]
        if step <= 1e-12 * abs(top):
            return _Branch(top, side * math.inf, True)
        lim = _aitken(geo_phi[-3:])
        if lim is None or lim > DIVERGENCE_CAP:
            return _Branch(math.inf, side * math.inf, True)
        return _Branch(max(lim, top), side * math.inf, True)
    if 0 < i_star < phi.size - 1:
        a, b = sorted((xs[i_star - 1], xs[i_star + 1]))
        width = b - a
        res = minimize_scalar(lambda x: -phi_at(x), bounds=(a, b), method="bounded",
                              options={"xatol": max(1e-12, 1e-10 * width)})
        if -res.fun > phi[i_star]:
            return _Branch(float(-res.fun), float(res.x), False)
    return _Branch(float(phi[i_star]), float(xs[i_star]), False)


def muckenhoupt_b(mu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS) -> MuckenhouptResult:
    """``b = max(sup_{x>=m} (1-F(x)) int_m^x dy/f, sup_{x<=m} F(x) int_x^m dy/f)``
    with ``m`` the median of ``mu``.

    Each branch is scanned on a grid mixing uniform spacing in ``x`` with
    geometric spacing in tail mass out to the ``trunc_q`` quantile; the
    running integral of ``1/f`` is accumulated cell by cell. The argmax is
    then refined by a bounded scalar search. A branch whose last
    ``MONOTONE_TAIL`` grid values still increase is flagged as attained at
    infinity and its limit is estimated by Aitken extrapolation over the
    geometric part of the grid.
    """
    if not mu.has_positive_density or mu.has_atoms:
        raise PositivityError("the Muckenhoupt constant needs a law with positive density")
    m = float(mu.median())
    right = _branch(mu, m, +1, s)
    left = _branch(mu, m, -1, s)
    return MuckenhouptResult(float(max(right.sup, left.sup)), float(right.sup), float(left.sup),
                             float(right.arg), float(left.arg), m,
                             bool(right.at_infinity), bool(left.at_infinity))


def fg_ratio_integral(mu: Distribution1D, nu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS,
                      lo: float | None = None, hi: float | None = None) -> float:
    """``int (F - G)^2 / f`` over ``[lo, hi]`` (default: the support of ``mu``).

    Returns ``inf`` when ``nu`` puts mass where ``f`` vanishes or the
    integral exceeds the divergence cap.
    """
    if not mu.has_positive_density:
        raise PositivityError("the reference law needs a positive density")
    if nu.support.lo < mu.support.lo or nu.support.hi > mu.support.hi:
        return math.inf
    a = mu.support.lo if lo is None else max(lo, mu.support.lo)
    b = mu.support.hi if hi is None else min(hi, mu.support.hi)
    if not b > a:
        return 0.0
    split = 0.5 * (mu.median() + nu.median())
    log_diff = abs_cdf_difference(mu, nu, split)

    window = mu.reliable

    def integrand(x):
        with np.errstate(invalid="ignore", over="ignore"):
            ld = log_diff(x)
            t = np.exp(2.0 * ld - mu._logpdf(x))
        return np.where(np.isneginf(ld) | ~window.contains(x), 0.0, t)

    bps = sorted(set(mu.breakpoints + nu.breakpoints + (split,)))
    try:
        value, _ = integrate_with_error(integrand, (a, b), s, breakpoints=bps,
                                        scale=max(mu.scale, nu.scale))
    except EvaluationError:
        return math.inf
    except AccuracyError as exc:
        if abs(exc.estimate) > DIVERGENCE_CAP:
            return math.inf
        raise
    return math.inf if value > DIVERGENCE_CAP else max(value, 0.0)


def _b_value(mu, s, b):
    if b is None:
        return muckenhoupt_b(mu, s).b
    return b.b if isinstance(b, MuckenhouptResult) else float(b)


def _times(c: float, x: float) -> float:
    # 0 * inf is read as inf: the hypothesis (finite constant) is what fails
    if x == 0.0 and math.isinf(c):
        return math.inf
    return c * x


def verify_prop1(mu: Distribution1D, nu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS,
                 label: str = "") -> InequalityReport:
    w2 = wq_quantile(mu, nu, 2, s).value
    fg = fg_ratio_integral(mu, nu, s)
    return InequalityReport("prop1", w2 * w2, 4.0 * fg, 4.0, "W2^2", "4*int (F-G)^2/f",
                            label=label, details={"w2": w2, "fg_int": fg}, settings=s.as_dict())


def verify_prop2(mu: Distribution1D, nu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS,
                 b=None, label: str = "") -> InequalityReport:
    bval = _b_value(mu, s, b)
    fg = fg_ratio_integral(mu, nu, s)
    chi = chi_square_sq(nu, mu, s).value
    rhs = _times(4.0 * bval, chi)
    return InequalityReport("prop2", fg, rhs, 4.0 * bval, "int (F-G)^2/f", "4*b*chi2",
                            vacuous=not (math.isfinite(bval) and math.isfinite(chi)), label=label,
                            details={"b": bval, "chi_sq": chi}, settings=s.as_dict())


def verify_tchi_from_b(mu: Distribution1D, nu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS,
                       b=None, label: str = "") -> InequalityReport:
    bval = _b_value(mu, s, b)
    w2 = wq_quantile(mu, nu, 2, s).value
    chi = chi_square_sq(nu, mu, s).value
    rhs = _times(16.0 * bval, chi)
    ratio = rhs / (w2 * w2) if w2 > 0 else math.inf
    return InequalityReport("tchi_16b", w2 * w2, rhs, 16.0 * bval, "W2^2", "16*b*chi2",
                            vacuous=not (math.isfinite(bval) and math.isfinite(chi)), label=label,
                            details={"b": bval, "chi_sq": chi, "rhs_over_lhs": ratio},
                            settings=s.as_dict())


def _positive_constant(C: float) -> float:
    C = float(C)
    if not (C > 0 and math.isfinite(C)):
        raise DomainError(f"constant must be positive and finite, got {C}")
    return C


def tchi_constant_from_poincare(C: float) -> float:
    """Transport-chi-square constant implied by a Poincare constant ``C``: ``32 C``."""
    return 32.0 * _positive_constant(C)


def poincare_b_bridge(C: float) -> float:
    """Bound ``b <= 2 C`` on the Muckenhoupt constant of a law with Poincare constant ``C``.

    Only this direction is provided; combined with ``16 b`` it gives ``32 C``.
    """
    return 2.0 * _positive_constant(C)


@dataclass
class ShiftCounterexample:
    m: float
    w2_sq: float
    w2_sq_numeric: float
    lower_bound: float
    fg_int: float
    fg_tail: float
    ratio: float
    checks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "checks"}
        out["checks"] = [c.to_dict() for c in self.checks]
        return out


def shift_lower_bound(m: float) -> float:
    """``e^{-m} (e^m - 1)^2 / 2``, the part of the functional on ``[m, inf)``."""
    return 0.5 * math.exp(-m) * math.expm1(m) ** 2


def counterexample_shift(m: float, s: QuadSettings = DEFAULT_SETTINGS) -> ShiftCounterexample:
    """Laplace law against its translate by ``m``: ``W_2^2 = m^2`` while the
    ``(F-G)^2/f`` functional grows exponentially in ``m``."""
    if not m > 0:
        raise DomainError("the shift must be positive")
    mu, nu = Laplace(0.0, 1.0), Laplace(m, 1.0)
    w2n = wq_quantile(mu, nu, 2, s).value ** 2
    fg = fg_ratio_integral(mu, nu, s)
    tail = fg_ratio_integral(mu, nu, s, lo=m)
    lb = shift_lower_bound(m)
    out = ShiftCounterexample(m, m * m, w2n, lb, fg, tail, fg / (m * m))
    cfg = s.as_dict()
    out.checks = [
        InequalityReport("shift_w2", abs(w2n - m * m), 0.0, 0.0, "|W2^2 - m^2|", "0",
                         label=f"m={m:g}", settings=cfg),
        InequalityReport("shift_lower_bound", lb / (m * m), fg / (m * m), 1.0,
                         "e^-m (e^m-1)^2 / (2 m^2)", "int (F-G)^2/f / W2^2",
                         label=f"m={m:g}", settings=cfg),
    ]
    return out


GN_FG_FACTOR = (math.e ** 2 - 2 * math.e - 1) / (math.e - 1)


def gn_chi_lower_bound(n: int) -> float:
    return (math.sqrt(math.e) + 1) * math.exp(-(n + 1) / 2.0) - math.exp(-n)


def gn_fg_upper_bound(n: int) -> float:
    return GN_FG_FACTOR * math.exp(-n)


@dataclass
class GnCounterexample:
    n: int
    chi_sq: float
    chi_series: float
    chi_lb: float
    fg_int: float
    fg_ub: float
    ratio: float
    checks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "checks"}
        out["checks"] = [c.to_dict() for c in self.checks]
        return out


def counterexample_gn(n: int, s: QuadSettings = DEFAULT_SETTINGS) -> GnCounterexample:
    """The g_n law against the Laplace law: ``chi_2^2`` decays like
    ``e^{-n/2}`` while ``int (F - G_n)^2 / f`` decays like ``e^{-n}``."""
    if int(n) != n or n < 1:
        raise DomainError("n must be an integer >= 1")
    n = int(n)
    mu, nu = Laplace(0.0, 1.0), make_gn(n)
    chi = chi_square_sq(nu, mu, s).value
    fg = fg_ratio_integral(mu, nu, s)
    out = GnCounterexample(n, chi, gn_chi_square_series(n), gn_chi_lower_bound(n), fg,
                           gn_fg_upper_bound(n), chi / fg if fg > 0 else math.inf)
    cfg = s.as_dict()
    tag = f"n={n}"
    out.checks = [
        InequalityReport("gn_chi_lower", out.chi_lb, chi, 1.0, "(sqrt(e)+1)e^{-(n+1)/2}-e^{-n}",
                         "chi2(g_n|f)", label=tag, settings=cfg),
        InequalityReport("gn_fg_upper", fg, out.fg_ub, GN_FG_FACTOR, "int (F-G_n)^2/f",
                         "(e^2-2e-1)/(e-1) e^{-n}", label=tag, settings=cfg),
        InequalityReport("gn_series", abs(chi - out.chi_series), 0.0, 0.0, "|chi2 - series|", "0",
                         tol=1e-8, label=tag, settings=cfg),
    ]
    return out
