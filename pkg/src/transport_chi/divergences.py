"""Chi-square pseudo-distance and relative entropy between densities.

Integrands are assembled from log-densities, so ratios such as ``g**2/f``
stay finite deep in the tails where both densities underflow. A point where
``nu`` has density but ``mu`` has none makes ``nu`` singular with respect to
``mu``; both divergences are then infinite. Outside ``mu.reliable`` (which
differs from the support only for approximated laws) the integrand is taken
as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution1D, log_abs_diff
from .errors import AccuracyError, DomainError, EvaluationError
from .numerics import DEFAULT_SETTINGS, DIVERGENCE_CAP, QuadSettings, integrate_with_error

KINDS = ("chi_square_squared", "entropy")
CHI_FORMS = ("difference", "ratio")


@dataclass(frozen=True)
class DivergenceResult:
    value: float
    kind: str
    abs_cont: bool = True
    est_error: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if not self.abs_cont and self.value != math.inf:
            raise ValueError("a singular pair must have infinite divergence")
        if not self.value >= 0 and not math.isclose(self.value, 0.0, abs_tol=1e-9):
            raise ValueError(f"divergence must be nonnegative, got {self.value}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


class _Singular(Exception):
    pass


def _support_inside(nu: Distribution1D, mu: Distribution1D) -> bool:
    return nu.support.lo >= mu.support.lo and nu.support.hi <= mu.support.hi


def _log_densities(nu, mu, x):
    """Log-densities at ``x``; points outside ``mu.reliable`` get ``-inf`` for both."""
    inside = mu.reliable.contains(x)
    lf = np.where(inside, mu._logpdf(x), -np.inf)
    lg = np.where(inside, nu._logpdf(x), -np.inf)
    if np.any(np.isneginf(lf) & ~np.isneginf(lg)):
        raise _Singular
    return lf, lg


def _quad(integrand, nu, mu, domain, s):
    bps = sorted(set(mu.breakpoints + nu.breakpoints))
    scale = max(mu.scale, nu.scale)
    try:
        value, err = integrate_with_error(integrand, domain, s, breakpoints=bps, scale=scale)
    except _Singular:
        return math.inf, False, math.inf
    except EvaluationError:
        return math.inf, True, math.inf
    except AccuracyError as exc:
        if abs(exc.estimate) > DIVERGENCE_CAP:
            return math.inf, True, math.inf
        raise
    if value > DIVERGENCE_CAP:
        return math.inf, True, math.inf
    return max(value, 0.0), True, err


def chi_square_sq(nu: Distribution1D, mu: Distribution1D, s: QuadSettings = DEFAULT_SETTINGS,
                  form: str = "difference") -> DivergenceResult:
    """``chi_2^2(nu|mu) = int (f - g)^2 / f`` where ``f``, ``g`` are the densities of ``mu``, ``nu``.

    ``form="ratio"`` evaluates the same integral as ``int (g/f - 1)^2 f``.
    """
    if form not in CHI_FORMS:
        raise DomainError(f"form must be one of {CHI_FORMS}")
    if nu.has_atoms or mu.has_atoms:
        raise DomainError("divergences need laws with densities")
    if not _support_inside(nu, mu):
        return DivergenceResult(math.inf, "chi_square_squared", abs_cont=False)

    def integrand(x):
        lf, lg = _log_densities(nu, mu, x)
        with np.errstate(invalid="ignore", over="ignore"):
            if form == "difference":
                log_t = 2.0 * log_abs_diff(lf, lg) - lf
            else:
                log_t = 2.0 * log_abs_diff(lg - lf, np.zeros_like(lf)) + lf
            log_t = np.where(np.isneginf(lf), -np.inf, log_t)
            return np.exp(log_t)

    value, ac, err = _quad(integrand, nu, mu, mu.support, s)
    return DivergenceResult(value, "chi_square_squared", ac, err)


def rel_entropy(nu: Distribution1D, mu: Distribution1D,
                s: QuadSettings = DEFAULT_SETTINGS) -> DivergenceResult:
    """``H(nu|mu) = int g log(g/f)``, with ``0 log 0 = 0``."""
    if nu.has_atoms or mu.has_atoms:
        raise DomainError("divergences need laws with densities")
    if not _support_inside(nu, mu):
        return DivergenceResult(math.inf, "entropy", abs_cont=False)

    def integrand(x):
        lf, lg = _log_densities(nu, mu, x)
        with np.errstate(invalid="ignore", over="ignore"):
            t = np.exp(lg) * (lg - lf)
        return np.where(np.isneginf(lg), 0.0, t)

    value, ac, err = _quad(integrand, nu, mu, nu.support, s)
    return DivergenceResult(value, "entropy", ac, err)
