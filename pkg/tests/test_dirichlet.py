import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from compop.dirichlet import (
    CharacterSample,
    DirichletPolynomial as D,
    evaluate,
    factorize,
    mc_power_mean,
    multiply,
    norm,
    omega,
    shift_twist,
)
from compop.errors import CoverageError, DomainError, MethodError
from compop.zeta import point_eval_norm

import oracles
from strategies import polys


def test_product_distinct_primes():
    f = multiply(D({1: 1, 2: 1}), D({1: 1, 3: 1}), 100).poly
    assert f == D({1: 1, 2: 1, 3: 1, 6: 1})


def test_product_frequency_and_binomial():
    assert multiply(D({2: 1}), D({2: 1}), 10).poly == D({4: 1})
    assert multiply(D({1: 1, 2: 1}), D({1: 1, 2: 1}), 10).poly == D({1: 1, 2: 2, 4: 1})


def test_product_cap_reports_discarded():
    prod = multiply(D({1: 1, 5: 2}), D({1: 1, 5: 3}), 10)
    assert prod.poly == D({1: 1, 5: 5})
    assert prod.discarded == pytest.approx(6.0)


def test_evaluate_examples():
    assert evaluate(D({2: 1}), 1.0) == pytest.approx(0.5)
    s = 0.7 + 2j
    assert evaluate(D({2: 1}), s, 1) == pytest.approx(-math.log(2) * 2 ** (-s))
    assert evaluate(D({1: 1}), s, 1) == 0


def test_shift_and_twist():
    assert shift_twist(D({2: 1}), 1.0).allclose(D({2: 0.5}))
    chi = CharacterSample((1j,))
    assert shift_twist(D({2: 1}), 0.0, chi).allclose(D({2: 1j}))


def test_character_coverage():
    with pytest.raises(CoverageError):
        CharacterSample((1.0,))(3)
    with pytest.raises(DomainError):
        CharacterSample((2.0,))


def test_norm_examples():
    f = D({1: 1, 2: 1})
    assert norm(f, 2).value == pytest.approx(math.sqrt(2))
    assert norm(f, 4, "even-convolution").value == pytest.approx(6 ** 0.25, rel=1e-14)
    mean, se = mc_power_mean(f, 4, 1_000_000, seed=3)
    assert abs(mean - 6.0) <= 3 * se


def test_norm_against_bruteforce_oracle():
    f = {1: 1, 2: 0.5 - 0.2j, 3: 0.3j, 6: -0.4}
    # frozen from oracles.h4_norm_fourth
    assert oracles.h4_norm_fourth(f) == pytest.approx(3.4334, rel=1e-13)
    assert norm(D(f), 4, "even-convolution").value ** 4 == pytest.approx(3.4334, rel=1e-13)


def test_norm_method_errors():
    f = D({1: 1})
    with pytest.raises(MethodError):
        norm(f, 3, "coeff-l2")
    with pytest.raises(MethodError):
        norm(f, 3, "even-convolution")
    with pytest.raises(MethodError):
        norm(f, 2, "monte-carlo")
    with pytest.raises(MethodError):
        norm(f, 0.5)


def test_factorize_and_omega():
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert omega(1) == 0 and omega(12) == 3


def test_json_roundtrip():
    f = D({1: 1, 7: 0.5 - 2j})
    assert D.from_json(f.to_json()) == f


def test_mc_reproducible():
    f = D({1: 1, 2: 1j, 15: -0.5})
    assert mc_power_mean(f, 3, 20_000, seed=5) == mc_power_mean(f, 3, 20_000, seed=5)


@given(polys(), polys())
def test_multiply_commutes(f, g):
    cap = f.max_freq * g.max_freq
    assert multiply(f, g, cap).poly.allclose(multiply(g, f, cap).poly)


@given(polys(max_terms=4, max_freq=20), polys(max_terms=4, max_freq=20), polys(max_terms=4, max_freq=20))
def test_multiply_associates(f, g, h):
    cap = 20**3
    a = multiply(multiply(f, g, cap).poly, h, cap).poly
    b = multiply(f, multiply(g, h, cap).poly, cap).poly
    assert a.allclose(b, atol=1e-9)


@given(polys(), polys())
def test_multiply_matches_bruteforce(f, g):
    ref = oracles.brute_product(f.as_dict(), g.as_dict())
    assert multiply(f, g, f.max_freq * g.max_freq).poly.allclose(D(ref), atol=1e-12)


@given(polys(), st.lists(st.floats(0, 2 * math.pi), min_size=15, max_size=15))
def test_h2_norm_twist_invariant(f, ang):
    # 15 primes reach 47, so every frequency up to 48 is covered
    chi = CharacterSample(tuple(np.exp(1j * np.array(ang))))
    g = shift_twist(f, 0.0, chi)
    assert norm(g, 2).value == pytest.approx(norm(f, 2).value, rel=1e-12)


@given(polys(), st.floats(0.55, 3.0), st.floats(-20, 20), st.sampled_from([2, 4]))
def test_point_evaluation_bound(f, sigma, t, p):
    s = complex(sigma, t)
    nv = norm(f, p, "even-convolution").value
    assert abs(evaluate(f, s)) <= point_eval_norm(s, p) * nv * (1 + 1e-12)
