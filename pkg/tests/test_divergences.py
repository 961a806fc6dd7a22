import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from transport_chi.distributions import Gaussian, Laplace, Uniform, make_gn, truncate_cdf
from transport_chi.divergences import DivergenceResult, chi_square_sq, rel_entropy
from transport_chi.errors import DomainError
from transport_chi.family import STANDARD_PAIRS, law, members

# mpmath quad of (f-g)^2/f, 30 digits
LAPLACE_SHIFT_CHI = {0.5: 0.2217739941905662051, 1.0: 0.85729964671823438754, 2.0: 3.9321426122500115449}


@pytest.mark.parametrize("name", ["gaussian(0,1)", "laplace(0,1)", "uniform(0,1)", "gn(3)"])
def test_identical_laws(name):
    d = law(name)
    assert chi_square_sq(d, d).value == 0.0
    assert rel_entropy(d, d).value == 0.0


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0, 2.0])
def test_gaussian_closed_forms(a):
    mu, nu = Gaussian(0, 1), Gaussian(a, 1)
    assert chi_square_sq(nu, mu).value == pytest.approx(math.expm1(a * a), rel=1e-9)
    assert rel_entropy(nu, mu).value == pytest.approx(a * a / 2, rel=1e-9)


@pytest.mark.parametrize("m", sorted(LAPLACE_SHIFT_CHI))
def test_shifted_laplace_chi(m):
    assert chi_square_sq(Laplace(m, 1), Laplace(0, 1)).value == pytest.approx(LAPLACE_SHIFT_CHI[m], rel=1e-9)


def test_uniform_half_entropy():
    assert rel_entropy(Uniform(0, 0.5), Uniform(0, 1)).value == pytest.approx(math.log(2), rel=1e-12)
    assert chi_square_sq(Uniform(0, 0.5), Uniform(0, 1)).value == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_gn_matches_series(n):
    # mpmath values of the series
    oracle = {2: 0.78630110671034441879, 4: 0.33256934841997464568, 8: 0.048034196152373313178}
    r = chi_square_sq(make_gn(n), Laplace(0, 1))
    assert r.value == pytest.approx(oracle[n], abs=1e-10)


def test_singular_pair():
    r = chi_square_sq(Uniform(0, 2), Uniform(0, 1))
    assert r.value == math.inf and not r.abs_cont
    assert rel_entropy(Uniform(0, 2), Uniform(0, 1)).value == math.inf
    # density of nu where mu vanishes inside a common hull
    gap = law('{"family": "piecewise", "pieces": ['
              '{"lo": 0, "hi": 0.5, "density": {"type": "constant", "value": 1}},'
              '{"lo": 1.5, "hi": 2, "density": {"type": "constant", "value": 1}}]}')
    assert not chi_square_sq(Uniform(0, 2), gap).abs_cont


def test_heavy_against_light_diverges():
    r = chi_square_sq(Laplace(0, 1), Gaussian(0, 1))
    assert r.value == math.inf and r.abs_cont
    assert chi_square_sq(Gaussian(0, 2), Gaussian(0, 1)).value == math.inf
    # still finite when nu is lighter
    assert chi_square_sq(Gaussian(0, 1), Laplace(0, 1)).finite


def test_atoms_rejected():
    t = truncate_cdf(Gaussian(2, 1), Gaussian(0, 1), 3)
    assert t.has_atoms
    with pytest.raises(DomainError):
        chi_square_sq(t, Gaussian(0, 1))


def test_result_validation():
    with pytest.raises(ValueError):
        DivergenceResult(1.0, "chi_square_squared", abs_cont=False)
    with pytest.raises(ValueError):
        DivergenceResult(-0.5, "entropy")
    with pytest.raises(ValueError):
        DivergenceResult(0.5, "hellinger")


FINITE_PAIRS = [(a, b) for a, b in STANDARD_PAIRS if chi_square_sq(law(b), law(a)).finite]


@pytest.mark.parametrize("mu, nu", FINITE_PAIRS)
def test_entropy_below_chi_and_forms_agree(mu, nu):
    m, n = law(mu), law(nu)
    chi = chi_square_sq(n, m)
    h = rel_entropy(n, m)
    assert h.value >= -1e-10
    assert h.value <= chi.value + 1e-6 * (1 + chi.value)
    ratio = chi_square_sq(n, m, form="ratio")
    assert ratio.value == pytest.approx(chi.value, abs=2e-10, rel=2e-8)


def test_enough_finite_pairs():
    assert len(FINITE_PAIRS) >= 15


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-1.5, 1.5), s=st.floats(0.8, 1.3))
def test_gaussian_pair_properties(a, s):
    mu, nu = Gaussian(0, 1), Gaussian(a, s)
    chi = chi_square_sq(nu, mu).value
    h = rel_entropy(nu, mu).value
    # KL closed form between normals
    assert h == pytest.approx(math.log(1 / s) + (s * s + a * a) / 2 - 0.5, rel=1e-8, abs=1e-11)
    if s * s < 2:
        closed = math.exp(a * a / (2 - s * s)) / (s * math.sqrt(2 - s * s)) - 1
        assert chi == pytest.approx(closed, rel=1e-7, abs=1e-11)
    assert 0 <= h <= chi + 1e-9


@pytest.mark.parametrize("name", members())
def test_nonnegative_against_shift(name):
    d = law(name)
    other = law(name.replace("(0,", "(0.1,")) if "(0," in name else d
    assert chi_square_sq(other, d).value >= 0
    assert rel_entropy(other, d).value >= 0


def test_bad_form():
    with pytest.raises(DomainError):
        chi_square_sq(Gaussian(), Gaussian(), form="log")


def test_evaluation_has_no_side_effects():
    x = np.linspace(-3, 3, 5)
    before = Gaussian(0, 1).pdf(x)
    chi_square_sq(Gaussian(1, 1), Gaussian(0, 1))
    np.testing.assert_array_equal(before, Gaussian(0, 1).pdf(x))
