"""Hypothesis strategies for polynomials, symbols and point sets."""

from hypothesis import strategies as st

from compop.dirichlet import DirichletPolynomial

coeff = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def polys(draw, max_terms=6, max_freq=48, min_terms=1):
    freqs = draw(st.lists(st.integers(1, max_freq), min_size=min_terms, max_size=max_terms, unique=True))
    cs = draw(st.lists(coeff.filter(lambda c: abs(c) > 1e-3), min_size=len(freqs), max_size=len(freqs)))
    return DirichletPolynomial(zip(freqs, cs))
