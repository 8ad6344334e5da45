import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.discmaps import DiscMap
from compop.errors import DomainError, NumericalFailure
from compop.kernels import (
    ConditioningWarning,
    PointSequence,
    blaschke_separation,
    carleson_const_h2,
    gram,
    h1_interp_by_squaring,
    hinfty_interp_surrogate,
    interp_const_h2,
    lemma_bounds,
    lower_bound_general,
    random_strip,
)
from compop.zeta import zeta

from oracles import blaschke_two_symmetric, halfplane_carleson_two_points, zeta_carleson_two_points  # noqa: F401

HALFPLANE_CARLESON_1_100 = 1.0099995000374968
ZETA_CARLESON_1_100 = 1.7246486508474108


# -- point sequences ---------------------------------------------------------------

def test_point_validation():
    with pytest.raises(DomainError):
        PointSequence([0.5 + 1j])
    with pytest.raises(DomainError):
        PointSequence([1 + 1j, 1 + 1j])
    with pytest.raises(DomainError):
        PointSequence([1.0], kind="disc")
    with pytest.raises(DomainError):
        PointSequence([1.0], kind="strip")


def test_shift_restrict_roundtrip():
    S = PointSequence([1 + 1j, 1.2 - 5j, 0.8 + 20j])
    assert np.allclose(S.shift(0.5).points.real, [1.5, 1.7, 1.3])
    assert len(S.restrict(10)) == 2
    back = PointSequence.from_json_obj(S.to_json_obj())
    assert np.array_equal(back.points, S.points)


# -- Gram matrices -----------------------------------------------------------------

def test_single_point_gram():
    g = gram(PointSequence([1.0 + 3j]))
    assert g.G[0, 0] == pytest.approx(zeta(2.0))
    assert g.lam_min == pytest.approx(1) and g.lam_max == pytest.approx(1)


def test_disc_gram_is_szego_kernel():
    z = np.array([0.3, -0.2 + 0.5j])
    g = gram(PointSequence(z, "disc"))
    assert g.G[0, 1] == pytest.approx(1 / (1 - z[0] * np.conj(z[1])))
    assert g.G[1, 1] == pytest.approx(1 / (1 - abs(z[1]) ** 2))


def test_halfplane_carleson_two_points():
    S = PointSequence([1.0, 1.0 + 100j], "halfplane")
    assert carleson_const_h2(S) == pytest.approx(HALFPLANE_CARLESON_1_100, rel=1e-12)


def test_zeta_carleson_two_points():
    # the zeta kernel keeps |zeta(2 + 100i)| / zeta(2) of correlation at this distance
    S = PointSequence([1.0, 1.0 + 100j], "zeta")
    assert carleson_const_h2(S) == pytest.approx(ZETA_CARLESON_1_100, rel=1e-10)


def test_near_coincident_points_double_up():
    with pytest.warns(ConditioningWarning):
        c = carleson_const_h2(PointSequence([1.0, 1.0 + 1e-9j], "halfplane"))
    assert c == pytest.approx(2, abs=1e-6)
    with pytest.warns(ConditioningWarning), pytest.raises(NumericalFailure):
        interp_const_h2(PointSequence([1.0, 1.0 + 1e-9j], "halfplane"))


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 8))
def test_eigenvalues_interlace_on_removal(seed, n):
    S = random_strip(n, np.random.default_rng(seed), height=30.0, kind="halfplane")
    g = gram(S)
    h = gram(S.without(0))
    assert h.lam_max <= g.lam_max + 1e-10
    assert h.lam_min >= g.lam_min - 1e-10
    assert g.lam_min <= 1 + 1e-12 <= g.lam_max + 2e-12


# -- transfer lemmas ---------------------------------------------------------------

def test_lemma_carleson_transfer():
    z3 = float(zeta(3.0))
    assert lemma_bounds("4.1", theta=1.5, p=2, carleson_h2=2.0) == pytest.approx(2.0)
    assert lemma_bounds("4.1", theta=1.5, p=4, carleson_h2=2.0) == pytest.approx(z3**0.5 * 2.0)
    assert lemma_bounds("4.1", theta=1.5, p=1, mass=0.5) == pytest.approx(z3 * 0.5)


def test_lemma_shifted_interpolation():
    val = lemma_bounds("4.2", theta=1.0, delta=0.5, n=4, p=2, m_shifted=1.0)
    want = math.sqrt(zeta(2.0)) * math.sqrt(zeta(2.0) / zeta(4.0))
    assert val == pytest.approx(want)
    # p = inf picks up n^{1/2}
    val_inf = lemma_bounds("4.2", theta=1.0, delta=0.5, n=4, p=math.inf, m_shifted=1.0)
    assert val_inf == pytest.approx(want * 2)


@pytest.mark.parametrize("kw", [dict(theta=0.5, p=2, carleson_h2=1.0), dict(theta=1.0, p=0.5, carleson_h2=1.0)])
def test_lemma_domain(kw):
    with pytest.raises(DomainError):
        lemma_bounds("4.1", **kw)


def test_lemma_shifted_bound_dominates_interpolation_constant():
    rng = np.random.default_rng(4)
    for _ in range(5):
        S = random_strip(6, rng)
        theta = 1.0
        delta = float(S.points.real.min()) - 0.5
        M = interp_const_h2(S)
        rhs = lemma_bounds("4.2", theta=theta, delta=delta, n=len(S), p=2,
                           m_shifted=interp_const_h2(S.shift(theta)))
        assert M <= rhs


# -- squaring --------------------------------------------------------------------

def test_squaring_zero_targets():
    S = PointSequence([1 + 1j, 1.3 - 2j])
    res = h1_interp_by_squaring(S, [0, 0], samples=1000)
    assert res.h1_norm_exact == 0 and res.h1_norm_mc == 0 and res.residual == 0


def test_squaring_interpolates():
    S = PointSequence([1 + 1j, 1.3 - 2j, 0.9 + 4j])
    a = np.array([1.0, -0.5 + 0.2j, 0.3j])
    res = h1_interp_by_squaring(S, a, samples=20_000, seed=2)
    assert np.allclose(res(S.points), a, atol=1e-8)
    assert res.h1_norm_exact <= res.bound * (1 + 1e-12)
    assert res.h1_norm_mc <= res.h1_norm_exact + 4 * res.h1_se


def test_squaring_target_count():
    with pytest.raises(DomainError):
        h1_interp_by_squaring(PointSequence([1.0]), [1, 2])


# -- separation and lower bounds ------------------------------------------------

def test_blaschke_single_point():
    assert blaschke_separation(PointSequence([1 + 1j])) == 1.0


def test_blaschke_symmetric_pair():
    S = PointSequence([1 + 2j, 1 - 2j], "halfplane")
    assert blaschke_separation(S) == pytest.approx(0.9701425001453319, rel=1e-14)


@given(r=st.floats(0.01, 50), a=st.floats(0.6, 3))
def test_blaschke_symmetric_pair_property(r, a):
    S = PointSequence([complex(a, r), complex(a, -r)], "halfplane")
    assert blaschke_separation(S) == pytest.approx(blaschke_two_symmetric(a, r), rel=1e-12)


def test_hinfty_surrogate():
    out = hinfty_interp_surrogate(PointSequence([1 + 1j]))
    assert out["value"] == pytest.approx(2 * math.e)
    assert out["provenance"] == "surrogate"


def test_lower_bound_single_point():
    s, sp = 1.2 + 0.5j, 2.2 + 0.5j
    out = lower_bound_general("6.2", S=[s], S_prime=[sp], p=2, interp=1.0, carleson=1.0)
    assert out["value"] == pytest.approx(math.sqrt(zeta(2.4) / zeta(4.4)))
    assert out["terms"]["zeta_ratio_inf"]["provenance"] == "computed"


def test_lower_bound_checks_preimage():
    from compop.symbols import make_symbol
    sym = make_symbol("shift", A=1)
    ok = lower_bound_general("6.2", S=[2 + 1j], S_prime=[1 + 1j], p=2, interp=1.0, carleson=1.0, symbol=sym)
    assert ok["n"] == 1
    with pytest.raises(DomainError):
        lower_bound_general("6.2", S=[2 + 1j], S_prime=[1.5 + 1j], p=2, interp=1.0, carleson=1.0, symbol=sym)


def test_lower_bound_disc_variant():
    out = lower_bound_general("9.2", Z=np.array([0.0, 0.5]), omega=DiscMap.scalar(0.5), p=2)
    assert out["value"] > 0
    assert out["terms"]["interp"]["provenance"] == "computed"
    # (1 - 0.25) / (1 - 0.0625) at z = 0.5
    assert out["terms"]["disc_ratio_inf"]["value"] == pytest.approx(0.8)
