"""Constant for products of laws and the two lemmas it rests on.

The lemma on densities is checked on discrete product measures, where it is
an identity between finite sums; the moment lemma is checked in dimension
one against a transport-chi-square constant supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution1D
from .errors import DomainError, SpecError
from .numerics import DEFAULT_SETTINGS, QuadSettings
from .reports import InequalityReport


@dataclass(frozen=True)
class TensorConstantInput:
    C1: float
    d1: int
    C2: float
    d2: int

    def __post_init__(self):
        for name in ("C1", "C2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        for name in ("d1", "d2"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {v}")

    def swapped(self) -> "TensorConstantInput":
        return TensorConstantInput(self.C2, self.d2, self.C1, self.d1)


def _branch(Ca: float, Cb: float, db: int) -> float:
    return Ca + Cb * (1.0 + math.sqrt((3 * db + 2) * db))


def tensor_constant(inp: TensorConstantInput) -> float:
    """``min(C1 + C2 (1 + sqrt((3 d2 + 2) d2)), C2 + C1 (1 + sqrt((3 d1 + 2) d1)))``."""
    return min(_branch(inp.C1, inp.C2, inp.d2), _branch(inp.C2, inp.C1, inp.d1))


@dataclass(frozen=True)
class DiscreteProductDensity:
    """Density ``rho`` of a law on a product of two finite grids with respect
    to the product of the grid weights."""

    grid1: np.ndarray
    w1: np.ndarray
    grid2: np.ndarray
    w2: np.ndarray
    rho: np.ndarray
    atol: float = 1e-12

    def __post_init__(self):
        for name in ("grid1", "w1", "grid2", "w2", "rho"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.w1.ndim != 1 or self.w2.ndim != 1 or self.grid1.shape != self.w1.shape \
                or self.grid2.shape != self.w2.shape:
            raise SpecError("grids and weights must be matching one-dimensional arrays")
        if self.rho.shape != (self.w1.size, self.w2.size):
            raise SpecError(f"rho must have shape {(self.w1.size, self.w2.size)}, got {self.rho.shape}")
        if np.any(self.w1 < 0) or np.any(self.w2 < 0) or np.any(self.rho < 0):
            raise SpecError("weights and rho must be nonnegative")
        if abs(self.w1.sum() - 1) > self.atol or abs(self.w2.sum() - 1) > self.atol:
            raise SpecError("each weight vector must sum to 1")
        if abs(self.w1 @ self.rho @ self.w2 - 1) > self.atol:
            raise SpecError("rho must integrate to 1 against the product weights")

    @property
    def rho1(self) -> np.ndarray:
        """First marginal density ``rho_1(x1) = sum_j rho(x1, x2_j) w2_j``."""
        return self.rho @ self.w2

    @classmethod
    def random(cls, rng: np.random.Generator, k1: int = 5, k2: int = 5) -> "DiscreteProductDensity":
        """Random grids, Dirichlet weights and a positive ``rho`` renormalized to mass 1."""
        w1 = rng.dirichlet(np.ones(k1))
        w2 = rng.dirichlet(np.ones(k2))
        rho = rng.exponential(1.0, size=(k1, k2)) ** 2
        rho /= w1 @ rho @ w2
        return cls(np.sort(rng.normal(size=k1)), w1, np.sort(rng.normal(size=k2)), w2, rho)


def rhogd_sides(dpd: DiscreteProductDensity, alpha: float, beta: float) -> tuple[float, float]:
    """Both sides of the density lemma as finite sums, every term restricted
    to the grid rows where ``rho1 >= 1/alpha``.

    ``lhs = sum (rho/rho1 - 1)^2 rho1 w1 w2 + beta sum (rho1 - 1)^2 w1``
    ``rhs = beta sum (rho - 1)^2 w1 w2``
    """
    rho1 = dpd.rho1
    keep = rho1 >= 1.0 / alpha
    r, r1, w1 = dpd.rho[keep], rho1[keep], dpd.w1[keep]
    cond = (r / r1[:, None] - 1.0) ** 2 * r1[:, None]
    lhs = float(w1 @ cond @ dpd.w2 + beta * (w1 @ (r1 - 1.0) ** 2))
    rhs = float(beta * (w1 @ (r - 1.0) ** 2 @ dpd.w2))
    return lhs, rhs


def check_rhogd_lemma(dpd: DiscreteProductDensity, alpha: float, beta: float,
                      label: str = "") -> InequalityReport:
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if beta < alpha:
        raise DomainError("beta must be at least alpha")
    lhs, rhs = rhogd_sides(dpd, alpha, beta)
    return InequalityReport("rhogd", lhs, rhs, beta, "conditional chi2 + beta*chi2(rho1)",
                            "beta*chi2(rho)", label=label, details={"alpha": alpha, "beta": beta})


def random_rhogd_reports(count: int, seed: int, alphas=(1.5, 3.0)) -> list[InequalityReport]:
    """``count`` seeded 5x5 checks cycling through ``alpha`` and ``beta in {alpha, 2 alpha}``."""
    rng = np.random.default_rng(seed)
    combos = [(a, b) for a in alphas for b in (a, 2 * a)]
    out = []
    for i in range(count):
        a, b = combos[i % len(combos)]
        out.append(check_rhogd_lemma(DiscreteProductDensity.random(rng), a, b, label=f"seed={seed}#{i}"))
    return out


def check_moment_lemma(mu: Distribution1D, C: float, s: QuadSettings = DEFAULT_SETTINGS,
                       label: str = "") -> tuple[InequalityReport, InequalityReport]:
    """Centered second moment ``<= C`` and centered fourth moment ``<= 5 C^2`` (dimension one)."""
    if not (C > 0 and math.isfinite(C)):
        raise DomainError("C must be positive and finite")
    m2 = mu.central_moment(2, s)
    m4 = mu.central_moment(4, s)
    d = 1
    cfg = s.as_dict()
    return (
        InequalityReport("moment2", m2, d * C, C, "E|X-EX|^2", "d*C", label=label, settings=cfg),
        InequalityReport("moment4", m4, (3 * d + 2) * d * C * C, (3 * d + 2) * d, "E|X-EX|^4",
                         "(3d+2)d*C^2", label=label, settings=cfg),
    )
