import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.dirichlet import CharacterSample, DirichletPolynomial as DP, norm, shift_twist
from compop.errors import DomainError
from compop.littlewood_paley import (
    LPQuadratureSpec,
    TailWarning,
    comparability_ratio,
    lp_functional,
    measure_nodes,
    norm_via_measure,
)

from oracles import lp_p2_closed_form
from strategies import polys

FAST = LPQuadratureSpec(samples=4000, sigma_count=64)


def _tol(res, k=4.0):
    return k * res.mc_se + 2 * res.grid_error + res.tail_bound + 1e-12


def test_constant_gives_power_of_modulus():
    for p in (1.0, 2.0, 3.5):
        res = lp_functional(DP({1: -2 + 1j}), LPQuadratureSpec(p=p))
        assert res.value == pytest.approx(abs(-2 + 1j) ** p)
        assert res.error == 0


def test_zero_polynomial():
    assert lp_functional(DP(), FAST).value == 0


@pytest.mark.parametrize("f", [
    {2: 1.0},
    {1: 1.0, 2: 0.5},
    {1: 0.3, 3: 1j, 4: -0.5, 10: 0.2},
])
def test_p2_matches_closed_form(f):
    res = lp_functional(DP(f), LPQuadratureSpec(p=2, samples=20_000))
    assert abs(res.value - lp_p2_closed_form(f)) <= _tol(res)


@pytest.mark.parametrize("p", [2.0, 4.0])
def test_homogeneity(p):
    f = DP({1: 0.5, 2: 1, 6: -0.4j})
    spec = LPQuadratureSpec(p=p, samples=4000, sigma_count=64, seed=5)
    lam = 1.7 - 0.4j
    a = lp_functional(f, spec).value
    b = lp_functional(f * lam, spec).value
    # same characters in both runs, so scaling is exact up to rounding
    assert b == pytest.approx(abs(lam) ** p * a, rel=1e-10)


def test_twist_invariance():
    f = DP({1: 0.5, 2: 1, 3: 0.7, 6: -0.4j})
    chi = CharacterSample.random(3, seed=11)
    spec = LPQuadratureSpec(p=4, samples=30_000, sigma_count=64, seed=1)
    a = lp_functional(f, spec)
    b = lp_functional(shift_twist(f, 0.0, chi), spec)
    assert abs(a.value - b.value) <= _tol(a) + _tol(b)


def test_refinement_keeps_value():
    f = DP({1: 1, 2: 0.5, 5: 0.25})
    spec = LPQuadratureSpec(p=4, samples=8000, sigma_count=64)
    a, b = lp_functional(f, spec), lp_functional(f, spec.refined())
    assert abs(a.value - b.value) <= _tol(a) + _tol(b)
    assert spec.refined().samples == 16000


def test_fixed_cut_warns_about_tail():
    spec = LPQuadratureSpec(p=2, sigma_max=0.01, samples=500)
    with pytest.warns(TailWarning):
        lp_functional(DP({2: 1.0}), spec)


def test_p_below_two_reports_floor_sensitivity():
    res = lp_functional(DP({1: 0.2, 2: 1.0}), LPQuadratureSpec(p=1.5, samples=2000, sigma_count=32))
    assert res.floor_sensitivity >= 0
    assert np.isfinite(res.value)


def test_spec_validation_and_json():
    with pytest.raises(DomainError):
        LPQuadratureSpec(p=0.5)
    with pytest.raises(DomainError):
        LPQuadratureSpec(measure="cauchy")
    with pytest.raises(DomainError):
        LPQuadratureSpec(sigma_min=1.0, sigma_max=0.5)
    spec = LPQuadratureSpec(p=4, measure="two-point", samples=123)
    assert LPQuadratureSpec.from_json(__import__("json").dumps(spec.to_json_obj())) == spec


def test_measure_nodes_have_unit_mass():
    for m in ("uniform", "two-point", "dirac"):
        x, w, mass = measure_nodes(m, 3)
        assert w.sum() == pytest.approx(mass)


@settings(max_examples=15)
@given(f=polys(max_terms=5, max_freq=30))
def test_norm_via_measure_independent_of_measure(f):
    # characters already randomize the vertical shift, so every probability measure gives the H^2 norm
    exact = norm(f, 2, "coeff-l2").value
    for m in ("uniform", "two-point", "dirac"):
        est = norm_via_measure(f, 2, m, samples=20_000, seed=3)
        assert abs(est.value - exact) <= 5 * est.stderr + 1e-9 * max(exact, 1)


def test_comparability_ratio_p2():
    corpus = [DP({1: 1, 2: 1}), DP({2: 1}), DP({1: 1, 3: 0.5j, 4: 0.1})]
    out = comparability_ratio(corpus, 2, LPQuadratureSpec(p=2, samples=20_000))
    want = [lp_p2_closed_form(f.as_dict()) / norm(f, 2, "coeff-l2").value ** 2 for f in corpus]
    assert np.allclose(out["ratios"], want, rtol=0.03)
    assert out["norm_method"] == "exact"
    assert out["min"] <= out["max"]
