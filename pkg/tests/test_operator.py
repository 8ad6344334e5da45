import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compop.dirichlet import DirichletPolynomial as DP, multiply, omega
from compop.discmaps import DiscMap
from compop.errors import DomainError, ResourceGuardError
from compop.operator import (
    assemble,
    assemble_disc,
    compose_basis_element,
    compose_polynomial,
    contraction_multiplier,
    partial_sum,
    project_omega,
    saksman_kernel_l1,
    saksman_lambda,
    saksman_multiplier,
    semigroup_frequencies,
    verify_bohr_pullback,
)
from compop.symbols import Symbol, make_symbol

from oracles import kernel_l1_mp  # noqa: F401  (frozen values below come from it)
from strategies import polys

KERNEL_L1 = {2: 1.2732395445612572, 3: 1.4359911240185168, 10: 1.9227535822198936}


# -- composing basis elements ------------------------------------------------------

def test_shift_scales_basis_element():
    got = compose_basis_element(make_symbol("shift", A=1), 3, 10)
    assert got.allclose(DP({3: 1 / 3}))


def test_dilation_squares_frequency():
    got = compose_basis_element(Symbol(2, DP()), 3, 10)
    assert got.allclose(DP({9: 1}))


@pytest.mark.parametrize("c", [0.3, -0.7, 0.2 + 0.4j])
def test_perturbed_identity_second_order(c):
    got = compose_basis_element(Symbol(1, DP({2: c})), 2, 16)
    # 2^{-s} exp(-c log 2 2^{-s}) = 2^{-s} - c log 2 4^{-s} + (c log 2)^2 / 2 8^{-s} - ...
    assert got.coeff(2) == pytest.approx(1)
    assert got.coeff(4) == pytest.approx(-c * math.log(2))
    assert got.coeff(8) == pytest.approx((c * math.log(2)) ** 2 / 2)
    assert got.coeff(3) == 0


def test_one_maps_to_one():
    got = compose_basis_element(make_symbol("affine", a=2, c=0.5), 1, 50)
    assert got.allclose(DP({1: 1}))


def test_rejects_bad_index_and_cap():
    sym = Symbol(2, DP())
    with pytest.raises(DomainError):
        compose_basis_element(sym, 0, 10)
    with pytest.raises(DomainError):
        compose_basis_element(sym, 4, 10)


@settings(max_examples=25)
@given(n=st.integers(2, 30), m=st.integers(2, 30), c=st.floats(-1, 1), A=st.floats(0, 2))
def test_composition_is_multiplicative(n, m, c, A):
    sym = Symbol(1, DP({1: A, 3: c}))
    cap = 4000
    lhs = compose_basis_element(sym, n * m, cap)
    rhs = multiply(compose_basis_element(sym, n, cap), compose_basis_element(sym, m, cap), cap).poly
    assert lhs.allclose(rhs, atol=1e-10)


@settings(max_examples=25)
@given(f=polys(max_terms=4, max_freq=12))
def test_compose_polynomial_is_linear_combination(f):
    sym = make_symbol("affine", a=1.5, c=0.4, q=3)
    g, _ = compose_polynomial(sym, f, 3**8)
    acc = DP()
    for n, b in f:
        acc = acc + compose_basis_element(sym, n, 3**8) * b
    assert g.allclose(acc, atol=1e-12)


# -- assembled sections ----------------------------------------------------------

def test_shift_matrix_is_diagonal():
    op = assemble(make_symbol("shift", A=1), 20)
    assert op.matrix.shape == (20, 20)
    assert np.allclose(op.matrix, np.diag(1 / np.arange(1, 21)))
    assert np.all(op.tails == 0)


def test_slope_one_columns_are_supported_on_multiples():
    sym = Symbol(1, DP({1: 1, 2: 0.3, 3: -0.2}))
    op = assemble(sym, 12, 60)
    for j, n in enumerate(op.col_freqs):
        rows = [op.row_freqs[i] for i in np.flatnonzero(np.abs(op.matrix[:, j]) > 0)]
        assert all(r % n == 0 for r in rows)
        assert op.matrix[op.row_freqs.index(n), j] == pytest.approx(n ** -1.0)


def test_matrix_is_read_only():
    op = assemble(make_symbol("shift", A=1), 5)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2


def test_tails_shrink_with_row_cap():
    sym = Symbol(1, DP({1: 1, 2: 0.5}))
    tails = [assemble(sym, 8, M).tails for M in (8, 32, 128)]
    assert np.all(tails[0] >= tails[1] - 1e-15)
    assert np.all(tails[1] >= tails[2] - 1e-15)
    assert tails[0].max() > 0


def test_resource_guard():
    with pytest.raises(ResourceGuardError):
        assemble(make_symbol("shift", A=1), 1000, max_entries=10_000)


def test_support_rows_drop_empty_frequencies():
    op = assemble(Symbol(2, DP({1: 1})), 5, rows="support")
    assert op.row_freqs == (1, 4, 9, 16, 25)


def test_semigroup_frequencies():
    assert semigroup_frequencies([1, 2, 3], 8) == [1, 2, 3, 4, 6, 8, 9, 12]
    assert semigroup_frequencies([1, 4], 4) == [1, 4, 16, 64]


def test_semigroup_basis_needs_zero_slope():
    with pytest.raises(DomainError):
        assemble(make_symbol("shift", A=1), 5, basis="semigroup")


def test_disc_scalar_singular_values():
    op = assemble_disc(DiscMap.scalar(0.5), 10)
    sv = np.linalg.svd(op.matrix, compute_uv=False)
    assert np.allclose(sv, 0.5 ** np.arange(11), atol=1e-15)
    assert np.allclose(op.tails, 0, atol=1e-7)


def test_disc_identity_is_identity():
    op = assemble_disc(DiscMap.identity(), 6)
    assert np.allclose(op.matrix, np.eye(7))


def test_csv_and_json_forms():
    op = assemble(make_symbol("shift", A=1), 3)
    obj = op.to_json_obj()
    assert obj["cols"] == 3 and obj["meta"]["col_freqs"] == [1, 2, 3]
    assert op.to_csv().splitlines()[0].startswith("row")


# -- coefficient operators -------------------------------------------------------

@given(f=polys())
def test_projections_partition(f):
    top = max((omega(n) for n, _ in f), default=0)
    parts = [project_omega(f, k) for k in range(top + 1)]
    total = DP()
    for p in parts:
        total = total + p
        assert project_omega(p, omega(p._freqs[0]) if len(p) else 0).allclose(p)
    assert total.allclose(f)


@given(f=polys(), N=st.integers(1, 60))
def test_partial_sum_idempotent(f, N):
    g = partial_sum(f, N)
    assert partial_sum(g, N) == g
    assert all(n <= N for n, _ in g)


def test_saksman_lambda_shape():
    N = 10
    assert saksman_lambda(1.0, N) == pytest.approx(0.5)
    assert saksman_lambda(1 - 1 / N, N) == 1.0
    assert saksman_lambda(1 + 1 / N, N) == 0.0
    assert saksman_lambda(-0.3, N) == 1.0


def test_saksman_multiplier_band():
    f = DP({n: 1.0 for n in range(1, 200)})
    res = saksman_multiplier(f, 20).poly
    lo, hi = 20 ** (1 - 1 / 20), 20 ** (1 + 1 / 20)
    for n, b in res:
        if n < lo:
            assert b == 1
        assert n <= hi
    assert res.coeff(20) == pytest.approx(0.5)


@pytest.mark.parametrize("N", sorted(KERNEL_L1))
def test_kernel_l1_matches_quadrature_oracle(N):
    assert saksman_kernel_l1(N) == pytest.approx(KERNEL_L1[N], rel=1e-7)


def test_kernel_l1_two_is_four_over_pi():
    assert saksman_kernel_l1(2) == pytest.approx(4 / math.pi, rel=1e-7)


def test_kernel_l1_grows():
    vals = [saksman_kernel_l1(N) for N in (2, 10, 100, 1000)]
    assert np.all(np.diff(vals) > 0)


def test_contraction_multiplier():
    f = DP({1: 1, 2: 1, 3: 1, 4: 1})
    res = contraction_multiplier(f, [1, 1, 0.5, 0.25], 3, p=2)
    assert res.result.allclose(DP({3: 0.5, 4: 0.25}))
    assert res.bound == pytest.approx(2 * 0.5 * 2.0)


def test_contraction_rejects_increasing_weights():
    with pytest.raises(DomainError):
        contraction_multiplier(DP({1: 1, 5: 1}), [1, 0.5, 0.6, 0.7, 0.8], 2, p=2)


def test_bohr_pullback_agrees():
    sym = make_symbol("affine", a=1.5, c=0.4)
    f = DP({1: 1, 2: 0.5, 3: -0.3j})
    rep = verify_bohr_pullback(sym, f, 2, samples=100_000, seed=3)
    assert rep.sigma < 4
    assert rep.lhs == pytest.approx(rep.rhs, rel=0.02)
