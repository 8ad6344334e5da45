import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from compop.errors import DomainError
from compop.zeta import point_eval_norm, zeta, zeta_complex


@pytest.mark.parametrize("k,exact", [(2, math.pi**2 / 6), (4, math.pi**4 / 90), (6, math.pi**6 / 945)])
def test_closed_forms(k, exact):
    assert float(zeta(float(k))) == pytest.approx(exact, rel=1e-12)


def test_monotone_on_grid():
    x = np.linspace(1.01, 10, 400)
    v = np.array([float(zeta(t)) for t in x])
    assert np.all(np.diff(v) < 0)


def test_point_eval_examples():
    assert point_eval_norm(1, 2) == pytest.approx(math.sqrt(math.pi**2 / 6))
    assert point_eval_norm(1, 1) == pytest.approx(math.pi**2 / 6)
    assert point_eval_norm(1, 400) == pytest.approx(1.0, abs=2e-3)
    with pytest.raises(DomainError):
        point_eval_norm(0.5, 2)


def test_domain():
    with pytest.raises(DomainError):
        zeta_complex(1.0 + 2j)


@given(st.floats(1.01, 30), st.floats(-400, 400))
def test_complex_against_mpmath(x, t):
    ref = complex(mp.zeta(mp.mpc(x, t)))
    assert abs(zeta_complex(complex(x, t)) - ref) <= 1e-11 * max(1.0, abs(ref))
