import math

import pytest
from hypothesis import given, settings, strategies as st

from transport_chi.distributions import Exponential, Gaussian, Laplace, Uniform, make_gn, scaled, shifted
from transport_chi.errors import DomainError, PositivityError
from transport_chi.family import law
from transport_chi.inequalities import (GN_FG_FACTOR, counterexample_gn, counterexample_shift,
                                        fg_ratio_integral, gn_chi_lower_bound, gn_fg_upper_bound,
                                        muckenhoupt_b, poincare_b_bridge, shift_lower_bound,
                                        tchi_constant_from_poincare, verify_prop1, verify_prop2,
                                        verify_tchi_from_b)
from transport_chi.reports import InequalityReport, report_tol

# pi * Phi(-x) * erfi(x / sqrt 2) maximized with mpmath at 30 digits
GAUSSIAN_B = 0.47881289503772420594
GAUSSIAN_B_ARG = 0.89939237290688884
# mpmath quad of (F-G)^2/f
FG_GAUSS_HALF = 0.26653543155644402869
FG_LAPLACE = {0.5: 0.26396460517806092834, 1.0: 1.2077020340058373013, 2.0: 7.1858634279440490803}


def test_b_laplace_is_approached_at_infinity():
    r = muckenhoupt_b(Laplace(0, 1))
    assert r.b == pytest.approx(1.0, abs=1e-9)
    assert r.right_at_infinity and r.left_at_infinity
    assert r.right_arg == math.inf and r.left_arg == -math.inf


def test_b_uniform():
    r = muckenhoupt_b(Uniform(0, 1))
    assert r.b == pytest.approx(1 / 16, abs=1e-12)
    assert r.right_arg == pytest.approx(0.75, abs=1e-6)
    assert not (r.right_at_infinity or r.left_at_infinity)


def test_b_gaussian_regression():
    r = muckenhoupt_b(Gaussian(0, 1))
    assert r.b == pytest.approx(GAUSSIAN_B, rel=1e-12)
    assert r.right_arg == pytest.approx(GAUSSIAN_B_ARG, abs=1e-6)
    assert r.left_sup == pytest.approx(r.right_sup, rel=1e-12)


def test_b_exponential():
    # tail e^{-x} times int_{ln 2}^x e^y dy -> 1 as x -> inf
    assert muckenhoupt_b(Exponential(1.0)).b == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("base, b0", [(Laplace(0, 1), 1.0), (Gaussian(0, 1), GAUSSIAN_B)])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_b_scales_quadratically(base, b0, lam):
    assert muckenhoupt_b(scaled(base, lam)).b == pytest.approx(lam * lam * b0, rel=1e-8)


@settings(max_examples=10, deadline=None)
@given(m=st.floats(-20, 20))
def test_b_translation_invariant(m):
    assert muckenhoupt_b(shifted(Gaussian(0, 1), m)).b == pytest.approx(GAUSSIAN_B, rel=1e-8)


def test_b_needs_positive_density():
    gap = law(
        '{"family": "piecewise", "pieces": ['
        '{"lo": 0, "hi": 0.5, "density": {"type": "constant", "value": 1}},'
        '{"lo": 1.5, "hi": 2, "density": {"type": "constant", "value": 1}}]}')
    with pytest.raises(PositivityError):
        muckenhoupt_b(gap)


def test_fg_oracles():
    assert fg_ratio_integral(Gaussian(0, 1), Gaussian(0.5, 1)) == pytest.approx(FG_GAUSS_HALF, rel=1e-9)
    for m, v in FG_LAPLACE.items():
        assert fg_ratio_integral(Laplace(0, 1), Laplace(m, 1)) == pytest.approx(v, rel=1e-9)
    assert fg_ratio_integral(Gaussian(0, 1), Gaussian(0, 1)) == 0.0


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_shift_tail_integral(m):
    tail = fg_ratio_integral(Laplace(0, 1), Laplace(m, 1), lo=m)
    assert tail == pytest.approx(shift_lower_bound(m), rel=1e-9)


def test_prop1_examples():
    same = verify_prop1(Gaussian(), Gaussian())
    assert same.passed and same.lhs == 0 and same.rhs == 0
    lap = verify_prop1(Laplace(0, 1), Laplace(1, 1))
    assert lap.lhs == pytest.approx(1.0, rel=1e-9)
    assert lap.rhs >= 4 * shift_lower_bound(1.0)
    assert lap.passed
    g = verify_prop1(Gaussian(0, 1), Gaussian(0.5, 1))
    assert g.lhs == pytest.approx(0.25, rel=1e-9)
    assert g.rhs == pytest.approx(4 * FG_GAUSS_HALF, rel=1e-9)
    assert g.passed


def test_prop2_examples():
    assert verify_prop2(Laplace(0, 1), Laplace(0, 1)).passed
    r = verify_prop2(Laplace(0, 1), Laplace(0.5, 1))
    assert r.passed and not r.vacuous
    assert r.lhs == pytest.approx(FG_LAPLACE[0.5], rel=1e-9)
    gn = verify_prop2(Laplace(0, 1), make_gn(5))
    assert gn.passed
    assert gn.lhs <= gn_fg_upper_bound(5)
    assert gn.rhs >= 4 * gn_chi_lower_bound(5)


def test_prop2_vacuous_when_chi_infinite():
    r = verify_prop2(Gaussian(0, 1), Laplace(0, 1))
    assert r.passed and r.vacuous


def test_tchi_examples():
    assert verify_tchi_from_b(Gaussian(), Gaussian()).passed
    r = verify_tchi_from_b(Laplace(0, 1), Laplace(1, 1))
    assert r.lhs == pytest.approx(1.0, rel=1e-9)
    # 16 b chi2 with b = 1 and chi2 from the mpmath table
    assert r.rhs == pytest.approx(16 * 0.85729964671823438754, rel=1e-8)
    for a in (0.25, 0.5, 1.0):
        g = verify_tchi_from_b(Gaussian(0, 1), Gaussian(a, 1))
        assert g.passed
        assert g.details["rhs_over_lhs"] == pytest.approx(16 * GAUSSIAN_B * math.expm1(a * a) / (a * a), rel=1e-7)


@pytest.mark.parametrize("C, expected", [(1, 32), (0.1, 3.2), (2, 64)])
def test_tchi_constant_from_poincare(C, expected):
    assert tchi_constant_from_poincare(C) == pytest.approx(expected)


@pytest.mark.parametrize("C, expected", [(1, 2), (0.5, 1)])
def test_bridge_constant(C, expected):
    assert poincare_b_bridge(C) == expected


@pytest.mark.parametrize("bad", [0, -1, math.inf, math.nan])
def test_constants_domain(bad):
    with pytest.raises(DomainError):
        tchi_constant_from_poincare(bad)
    with pytest.raises(DomainError):
        poincare_b_bridge(bad)


def test_shift_counterexample():
    r = counterexample_shift(1.0)
    assert r.w2_sq == 1.0
    assert r.w2_sq_numeric == pytest.approx(1.0, rel=1e-9)
    assert r.lower_bound == pytest.approx(0.5 * math.exp(-1) * (math.e - 1) ** 2, rel=1e-15)
    assert r.lower_bound == pytest.approx(0.5430, abs=1e-4)
    assert all(c.passed for c in r.checks)
    five = counterexample_shift(5.0)
    exact = (math.exp(5) - 2 + math.exp(-5)) / 50
    assert five.lower_bound / five.w2_sq == pytest.approx(exact, rel=1e-14)
    assert exact == pytest.approx(math.exp(5) / 50, rel=0.02)
    assert shift_lower_bound(1e-3) / 1e-6 == pytest.approx(0.5, rel=1e-3)
    with pytest.raises(DomainError):
        counterexample_shift(0.0)


def test_shift_ratio_strictly_increasing():
    ratios = [counterexample_shift(m).ratio for m in (1, 2, 3, 4, 5)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_gn_counterexample_fields():
    r = counterexample_gn(4)
    assert r.chi_sq == pytest.approx(0.33256934841997464568, abs=1e-10)
    assert r.chi_sq > r.chi_lb
    assert r.fg_int <= r.fg_ub
    assert r.fg_ub == pytest.approx(GN_FG_FACTOR * math.exp(-4))
    assert all(c.passed for c in r.checks)
    with pytest.raises(DomainError):
        counterexample_gn(0)


def test_report_tolerance_and_vacuity():
    r = InequalityReport("x", 1.0, 1.0 - 1e-7, 1.0, "a", "b")
    assert r.tol == pytest.approx(report_tol(1.0, 1.0 - 1e-7))
    assert r.passed
    assert not InequalityReport("x", 1.0, 0.99, 1.0, "a", "b").passed
    v = InequalityReport("x", 5.0, math.inf, 1.0, "a", "b")
    assert v.passed and v.vacuous
    assert not InequalityReport("x", math.nan, 1.0, 1.0, "a", "b").passed
    d = v.to_dict()
    assert d["rhs"] == "inf" and d["passed"] is True
