import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compop.dirichlet import DirichletPolynomial as DP
from compop.discmaps import DiscMap, TMap, parse_disc_map, parse_tmap
from compop.errors import ClassGError, DomainError
from compop.symbols import (
    PoleContactWarning,
    Symbol,
    check_class_g,
    compactness_criterion,
    fixed_point,
    make_symbol,
    nevanlinna_counting,
    parse_symbol,
    transfer_symbol,
)

from oracles import fixed_point_bisection, lens_taylor_mp


# -- construction and parsing -------------------------------------------------

def test_constant_symbol_needs_real_part_above_half():
    with pytest.raises(ClassGError):
        Symbol(0, DP({1: 0.4}))
    assert Symbol(0, DP({1: 0.75})).is_constant


def test_negative_or_fractional_slope_rejected():
    with pytest.raises(ClassGError):
        Symbol(-1, DP())
    with pytest.raises(ClassGError):
        Symbol(1.5, DP())


@pytest.mark.parametrize("text,c0,coeffs", [
    ("shift:1", 1, {1: 1}),
    ("affine:2,0.5", 0, {1: 2, 2: 0.5}),
    ("affine:2,0.5,3", 0, {1: 2, 3: 0.5}),
    ("identity", 1, {}),
])
def test_parse_symbol_forms(text, c0, coeffs):
    sym = parse_symbol(text)
    assert sym.c0 == c0
    assert sym.psi.allclose(DP(coeffs))


def test_symbol_json_roundtrip():
    sym = make_symbol("custom", c0=1, coeffs={1: 2, 3: 0.25 - 0.1j})
    back = parse_symbol(sym.to_json())
    assert back == sym
    assert json.loads(sym.to_json())["c0"] == 1


def test_unknown_family():
    with pytest.raises(DomainError):
        make_symbol("spiral")


def test_symbol_evaluation_and_derivative():
    sym = make_symbol("affine", a=2, c=0.5)
    s = 1.3 + 0.7j
    assert sym(s) == pytest.approx(2 + 0.5 * 2 ** (-s))
    assert sym.derivative(s) == pytest.approx(-0.5 * np.log(2) * 2 ** (-s))


# -- class membership ----------------------------------------------------------

def test_shift_has_unit_margin():
    rep = check_class_g(make_symbol("shift", A=1))
    assert rep.verdict == "heuristic-pass"
    assert rep.margin == pytest.approx(1.0)


def test_affine_margin_at_least_half():
    rep = check_class_g(make_symbol("affine", a=2, c=1))
    assert rep.verdict == "heuristic-pass"
    assert rep.margin >= 0.5


def test_negative_constant_term_fails():
    rep = check_class_g(Symbol(1, DP({1: -1})))
    assert rep.verdict == "fail"
    assert rep.margin < 0


# -- fixed points ----------------------------------------------------------------

def test_fixed_point_matches_bisection():
    fp = fixed_point(make_symbol("affine", a=2, c=0.5))
    alpha = fixed_point_bisection(2, 0.5)
    assert fp.alpha.real == pytest.approx(alpha, abs=1e-12)
    assert abs(fp.alpha.imag) < 1e-14
    assert fp.derivative.real == pytest.approx(-0.07998327436333559, rel=1e-12)


def test_fixed_point_needs_zero_slope():
    with pytest.raises(DomainError):
        fixed_point(make_symbol("shift", A=1))


@given(a=st.floats(1.0, 4.0), c=st.floats(-0.8, 0.8))
def test_fixed_point_is_fixed(a, c):
    sym = make_symbol("affine", a=a, c=c)
    fp = fixed_point(sym)
    assert abs(sym(fp.alpha) - fp.alpha) < 1e-10
    assert fp.alpha.real == pytest.approx(fixed_point_bisection(a, c), abs=1e-9)


# -- transference --------------------------------------------------------------

@pytest.mark.filterwarnings("ignore::compop.symbols.PoleContactWarning")
def test_transfer_identity_t0():
    sym = transfer_symbol(DiscMap.identity(), "T0", 4)
    want = DP({1: 1.5, 2: -2, 4: 2, 8: -2, 16: 2})
    assert sym.c0 == 0
    assert sym.psi.allclose(want, atol=1e-12)


def test_transfer_constant_map_is_constant():
    sym = transfer_symbol(DiscMap.scalar(0), "T0", 4)
    assert sym.psi.allclose(DP({1: 1.5}), atol=1e-14)


def test_lens_one_is_identity_and_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sym = transfer_symbol(DiscMap.lens(1.0), "T0", 5)
    assert any(issubclass(w.category, PoleContactWarning) for w in caught)
    assert sym.meta["pole_contact"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PoleContactWarning)
        ident = transfer_symbol(DiscMap.identity(), "T0", 5)
    assert sym.psi.allclose(ident.psi, atol=1e-12)


def test_lens_taylor_matches_oracle():
    got = DiscMap.lens(0.5).taylor(8)
    want = lens_taylor_mp(0.5, 8)
    assert np.allclose(got, want, atol=1e-14)


def test_disc_map_rejects_non_self_map():
    with pytest.raises(DomainError):
        DiscMap.scalar(1.5)
    with pytest.raises(DomainError):
        DiscMap.lens(1.5)


def test_parse_disc_map_and_tmap():
    assert parse_disc_map("lens:0.5") == DiscMap.lens(0.5)
    assert parse_tmap("T_eps:0.1") == TMap("T_eps", 0.1)


@given(x=st.floats(-0.95, 0.95), y=st.floats(-0.95, 0.95))
def test_tmap_lands_right_of_half(x, y):
    z = complex(x, y)
    if abs(z) >= 0.99:
        return
    for T in (TMap("T0"), TMap("T_eps", 0.1)):
        assert T(z).real > 0.5


# -- counting function ---------------------------------------------------------

def test_nevanlinna_shift():
    sym = make_symbol("shift", A=1)
    assert nevanlinna_counting(sym, 3 + 1j) == pytest.approx(2.0)
    assert nevanlinna_counting(sym, 0.5) == 0.0
    assert nevanlinna_counting(sym, -1) == 0.0


def test_nevanlinna_dilation():
    sym = Symbol(2, DP())
    assert nevanlinna_counting(sym, 3 + 1j) == pytest.approx(1.5)


def test_nevanlinna_status_reported():
    val, status = nevanlinna_counting(make_symbol("shift", A=1), 0.5, return_status=True)
    assert val == 0.0 and "outside" in status


@given(x=st.floats(0.05, 5.0), y=st.floats(-20, 20))
def test_nevanlinna_inverts_univalent_symbol(x, y):
    # derivative 1 - 0.3 log 2 * 2^{-s} has positive real part, so phi is univalent
    sym = Symbol(1, DP({1: 2, 2: 0.3}))
    w = complex(x, y)
    assert nevanlinna_counting(sym, sym(w)) == pytest.approx(x, abs=1e-8)


# -- compactness -----------------------------------------------------------------

def test_compactness_bounded_imaginary_part_satisfied():
    rep = compactness_criterion(Symbol(1, DP({1: 3, 2: 1})))
    assert rep.verdict == "criterion satisfied (heuristic)"


def test_compactness_pure_identity_fails():
    rep = compactness_criterion(Symbol(1, DP()))
    assert rep.verdict == "criterion not satisfied (heuristic)"


def test_compactness_imaginary_shift_fails():
    # Im psi is bounded but the counting ratio stays at 1
    rep = compactness_criterion(Symbol(1, DP({1: 1j})))
    assert rep.verdict == "criterion not satisfied (heuristic)"
    assert rep.im_bound == pytest.approx(1.0)


def test_compactness_needs_positive_slope():
    with pytest.raises(DomainError):
        compactness_criterion(make_symbol("affine", a=2, c=0.5))
