"""Built-in test family of law pairs and the property suites run over it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import Distribution1D, make_family, parse_spec, shifted
from .inequalities import (counterexample_gn, counterexample_shift, muckenhoupt_b, verify_prop1,
                           verify_prop2, verify_tchi_from_b)
from .mollification import contraction_sweep
from .numerics import DEFAULT_SETTINGS, QuadSettings
from .reports import InequalityReport
from .tensorization import (TensorConstantInput, check_moment_lemma, random_rhogd_reports,
                            tensor_constant)
from .transport import (stratified_sample, w1_cdf, w2_double_integral, w2_empirical, wq_quantile)

DEFAULT_SEED = 20240601

# (reference mu, other nu); mu always has a positive density
STANDARD_PAIRS = (
    ("gaussian(0,1)", "gaussian(0.25,1)"),
    ("gaussian(0,1)", "gaussian(0.5,1)"),
    ("gaussian(0,1)", "gaussian(1,1)"),
    ("gaussian(0,1)", "gaussian(0,0.8)"),
    ("gaussian(0,1)", "gaussian(0.3,1.2)"),
    ("gaussian(1,2)", "gaussian(0,1.5)"),
    ("gaussian(0,1)", "uniform(-1,1)"),
    ("gaussian(0,1)", "mix(0.5*gaussian(-0.5,1),0.5*gaussian(0.5,1))"),
    ("gaussian(0,1)", "laplace(0,1)"),
    ("laplace(0,1)", "laplace(0.5,1)"),
    ("laplace(0,1)", "laplace(1,1)"),
    ("laplace(0,1)", "laplace(2,1)"),
    ("laplace(0,1)", "gaussian(0.3,1)"),
    ("laplace(0,1)", "gaussian(0,1)"),
    ("laplace(0,2)", "laplace(1,1.5)"),
    ("laplace(0,1)", "gn(2)"),
    ("laplace(0,1)", "gn(3)"),
    ("laplace(0,1)", "gn(5)"),
    ("uniform(0,1)", "uniform(0.2,0.8)"),
    ("uniform(0,1)", "uniform(0,0.5)"),
    ("uniform(-1,1)", "uniform(-0.5,1)"),
    ("mix(0.5*gaussian(-1,1),0.5*gaussian(1,1))", "gaussian(0,1)"),
    ("mix(0.3*laplace(-1,1),0.7*laplace(1,1))", "laplace(0,1)"),
    ("exponential(1)", "exponential(1.5)"),
    ("exponential(1)", "uniform(0,1)"),
)

# well-concentrated pairs for the double-integral cross-check
DOUBLE_INTEGRAL_PAIRS = (
    ("gaussian(0,1)", "gaussian(0.5,1)"),
    ("gaussian(0,1)", "gaussian(1,1)"),
    ("gaussian(0,1)", "gaussian(0,0.8)"),
    ("gaussian(0,1)", "gaussian(0.3,1.2)"),
    ("laplace(0,1)", "laplace(0.5,1)"),
    ("laplace(0,1)", "laplace(1,1)"),
    ("laplace(0,1)", "gaussian(0.3,1)"),
    ("uniform(0,1)", "uniform(0.5,1.5)"),
    ("uniform(-1,1)", "uniform(-0.5,1)"),
    ("mix(0.5*gaussian(-1,1),0.5*gaussian(1,1))", "gaussian(0,1)"),
)

EMPIRICAL_PAIRS = (
    ("gaussian(0,1)", "gaussian(0.5,1)"),
    ("gaussian(0,1)", "gaussian(0.3,1.2)"),
    ("gaussian(1,2)", "gaussian(0,1.5)"),
    ("laplace(0,1)", "laplace(1,1)"),
    ("laplace(0,1)", "gaussian(0.3,1)"),
)
EMPIRICAL_SIZES = (100, 1000, 10_000)

MOLLIFY_PAIRS = (
    ("gaussian(0,1)", "gaussian(0.5,1)"),
    ("gaussian(0,1)", "gaussian(1,1)"),
    ("gaussian(0,1)", "uniform(-1,1)"),
    ("laplace(0,1)", "laplace(0.5,1)"),
    ("laplace(0,1)", "laplace(1,1)"),
    ("laplace(0,1)", "gaussian(0.3,1)"),
    ("uniform(0,1)", "gaussian(0,1)"),
    ("uniform(0,1)", "uniform(0.2,0.8)"),
    ("mix(0.5*gaussian(-1,1),0.5*gaussian(1,1))", "gaussian(0,1)"),
    ("exponential(1)", "exponential(1.5)"),
)
MOLLIFY_NS = (1, 10, 100)

SHIFT_MS = (1, 2, 3, 4, 5)
GN_NS = tuple(range(2, 9))
SUITES = ("chain", "metrics", "mollify", "tensor", "counterexamples")


@lru_cache(maxsize=None)
def law(text: str) -> Distribution1D:
    return make_family(parse_spec(text))


def pair_label(mu: str, nu: str) -> str:
    return f"{mu} | {nu}"


@dataclass(frozen=True)
class Pair:
    mu_text: str
    nu_text: str

    @property
    def mu(self) -> Distribution1D:
        return law(self.mu_text)

    @property
    def nu(self) -> Distribution1D:
        return law(self.nu_text)

    @property
    def label(self) -> str:
        return pair_label(self.mu_text, self.nu_text)


def pairs(table=STANDARD_PAIRS) -> list[Pair]:
    return sorted((Pair(a, b) for a, b in table), key=lambda p: p.label)


def members() -> list[str]:
    """Every law in the standard family with a positive density."""
    names = {t for pr in STANDARD_PAIRS for t in pr}
    return sorted(t for t in names if law(t).has_positive_density)


def b_certificate(text: str, s: QuadSettings = DEFAULT_SETTINGS) -> float:
    return _b_cached(text, s)


@lru_cache(maxsize=None)
def _b_cached(text: str, s: QuadSettings) -> float:
    return muckenhoupt_b(law(text), s).b


def chain_reports(s: QuadSettings = DEFAULT_SETTINGS) -> list[InequalityReport]:
    out = []
    for p in pairs():
        b = b_certificate(p.mu_text, s)
        out.append(verify_prop1(p.mu, p.nu, s, label=p.label))
        out.append(verify_prop2(p.mu, p.nu, s, b=b, label=p.label))
        out.append(verify_tchi_from_b(p.mu, p.nu, s, b=b, label=p.label))
    return out


def double_integral_reports(s: QuadSettings = DEFAULT_SETTINGS, tol: float = 1e-4) -> list[InequalityReport]:
    out = []
    for p in pairs(DOUBLE_INTEGRAL_PAIRS):
        wq = wq_quantile(p.mu, p.nu, 2, s).value
        wd = w2_double_integral(p.mu, p.nu, s).value
        out.append(InequalityReport("w2_methods_agree", abs(wq - wd), 0.0, 0.0, "|W2 quantile - W2 double|",
                                    "0", tol=tol, label=p.label,
                                    details={"quantile": wq, "double_integral": wd}, settings=s.as_dict()))
    return out


def empirical_reports(s: QuadSettings = DEFAULT_SETTINGS, tol: float = 1e-2) -> list[InequalityReport]:
    out = []
    for p in pairs(EMPIRICAL_PAIRS):
        ref = wq_quantile(p.mu, p.nu, 2, s).value
        errs = [abs(w2_empirical(stratified_sample(p.mu, n), stratified_sample(p.nu, n)).value - ref)
                for n in EMPIRICAL_SIZES]
        details = {"sizes": list(EMPIRICAL_SIZES), "errors": errs, "reference": ref}
        out.append(InequalityReport("w2_empirical_agree", errs[-1], 0.0, 0.0, "|W2 empirical - W2|", "0",
                                    tol=tol, label=p.label, details=details, settings=s.as_dict()))
        growth = max(b - a for a, b in zip(errs[:-1], errs[1:]))
        out.append(InequalityReport("w2_empirical_decay", growth, 0.0, 0.0, "largest error increase", "0",
                                    tol=0.0, label=p.label, details=details, settings=s.as_dict()))
    return out


def metric_reports(s: QuadSettings = DEFAULT_SETTINGS, seed: int = DEFAULT_SEED) -> list[InequalityReport]:
    """Method agreement, symmetry, triangle inequality, translation and ``W1 <= W2``."""
    cfg = s.as_dict()
    out = double_integral_reports(s) + empirical_reports(s)
    for p in pairs():
        w2 = wq_quantile(p.mu, p.nu, 2, s).value
        back = wq_quantile(p.nu, p.mu, 2, s).value
        out.append(InequalityReport("w2_symmetry", abs(w2 - back), 0.0, 0.0, "|W2(mu,nu) - W2(nu,mu)|", "0",
                                    label=p.label, settings=cfg))
        w1 = w1_cdf(p.mu, p.nu, s).value
        out.append(InequalityReport("w1_le_w2", w1, w2, 1.0, "W1", "W2", label=p.label,
                                    details={"w1_quantile": wq_quantile(p.mu, p.nu, 1, s).value}, settings=cfg))
    rng = np.random.default_rng(seed)
    names = members()
    for _ in range(20):
        a, b, c = (names[i] for i in rng.choice(len(names), size=3, replace=False))
        ab = wq_quantile(law(a), law(b), 2, s).value
        bc = wq_quantile(law(b), law(c), 2, s).value
        ac = wq_quantile(law(a), law(c), 2, s).value
        out.append(InequalityReport("w2_triangle", ac, ab + bc, 1.0, "W2(a,c)", "W2(a,b)+W2(b,c)",
                                    label=f"{a} | {b} | {c}", settings=cfg))
    for name in names:
        for m in (-1.5, 0.7):
            w = wq_quantile(law(name), shifted(law(name), m), 2, s).value
            out.append(InequalityReport("w2_translation", abs(w - abs(m)), 0.0, 0.0, "|W2(mu, mu+m) - |m||",
                                        "0", label=f"{name} shift {m:g}", settings=cfg))
    return out


def mollify_reports(s: QuadSettings = DEFAULT_SETTINGS) -> list[InequalityReport]:
    out = []
    for p in pairs(MOLLIFY_PAIRS):
        out.extend(contraction_sweep(p.mu, p.nu, MOLLIFY_NS, s, label=p.label))
    return out


def tensor_reports(s: QuadSettings = DEFAULT_SETTINGS, seed: int = DEFAULT_SEED,
                   count: int = 1000) -> list[InequalityReport]:
    out = []
    rng = np.random.default_rng(seed)
    for i in range(100):
        inp = TensorConstantInput(float(rng.uniform(0.01, 10)), int(rng.integers(1, 6)),
                                  float(rng.uniform(0.01, 10)), int(rng.integers(1, 6)))
        k, ks = tensor_constant(inp), tensor_constant(inp.swapped())
        tag = f"C1={inp.C1:.6g},d1={inp.d1},C2={inp.C2:.6g},d2={inp.d2}"
        out.append(InequalityReport("tensor_symmetry", abs(k - ks), 0.0, 0.0, "|K - K swapped|", "0",
                                    tol=1e-12 * k, label=tag))
        out.append(InequalityReport("tensor_dominates", max(inp.C1, inp.C2), k, 1.0, "max(C1,C2)", "K",
                                    tol=0.0, label=tag))
    out.extend(random_rhogd_reports(count, seed))
    for name in members():
        C = 16.0 * b_certificate(name, s)
        out.extend(check_moment_lemma(law(name), C, s, label=f"{name} C=16b={C:.6g}"))
    return out


def counterexample_records(s: QuadSettings = DEFAULT_SETTINGS):
    return ([counterexample_shift(m, s) for m in SHIFT_MS], [counterexample_gn(n, s) for n in GN_NS])


def counterexample_reports(s: QuadSettings = DEFAULT_SETTINGS) -> list[InequalityReport]:
    shifts, gns = counterexample_records(s)
    out = [c for rec in shifts + gns for c in rec.checks]
    ratios = [r.ratio for r in shifts]
    out.append(InequalityReport("shift_ratio_increasing", 0.0, min(b - a for a, b in zip(ratios[:-1], ratios[1:])),
                                0.0, "0", "smallest ratio increment", tol=0.0,
                                label=f"m={list(SHIFT_MS)}", details={"ratios": ratios}))
    last = gns[-1]
    out.append(InequalityReport("gn_ratio_exceeds_10", 10.0, last.ratio, 10.0, "10", "chi2 / int (F-G_n)^2/f",
                                tol=0.0, label=f"n={last.n}", details={"ratios": [g.ratio for g in gns]}))
    return out


def run_suite(name: str, s: QuadSettings = DEFAULT_SETTINGS, seed: int = DEFAULT_SEED) -> list[InequalityReport]:
    if name == "chain":
        return chain_reports(s)
    if name == "metrics":
        return metric_reports(s, seed)
    if name == "mollify":
        return mollify_reports(s)
    if name == "tensor":
        return tensor_reports(s, seed)
    if name == "counterexamples":
        return counterexample_reports(s)
    raise KeyError(name)


__all__ = [
    "DEFAULT_SEED", "DOUBLE_INTEGRAL_PAIRS", "EMPIRICAL_PAIRS", "MOLLIFY_PAIRS", "Pair", "STANDARD_PAIRS",
    "SUITES", "b_certificate", "chain_reports", "counterexample_records", "counterexample_reports",
    "double_integral_reports", "empirical_reports", "law", "members", "metric_reports", "mollify_reports",
    "pairs", "run_suite", "tensor_reports",
]
