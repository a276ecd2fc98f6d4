"""Hypothesis strategies for forms and elements."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from mcholonomy.forms import PolyForm

rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def monomial_keys(draw, n, max_poly=2, form_degree=None):
    exp = tuple(draw(st.integers(0, max_poly)) for _ in range(n))
    if sum(exp) > max_poly:
        exp = tuple(min(e, 1) for e in exp)
    if form_degree is None:
        ds = draw(st.sets(st.integers(1, n), max_size=n)) if n else set()
    else:
        ds = set(draw(st.permutations(list(range(1, n + 1))))[:form_degree]) if n else set()
    return exp, tuple(sorted(ds))


@st.composite
def forms(draw, n, max_poly=2, max_terms=4, form_degree=None):
    keys = draw(st.lists(monomial_keys(n, max_poly, form_degree), min_size=0, max_size=max_terms))
    out = PolyForm.zero(n)
    for exp, ds in keys:
        out = out + PolyForm.monomial(n, exp, ds, draw(rationals))
    return out


def homogeneous(n, k, max_poly=2, max_terms=3):
    return forms(n, max_poly, max_terms, form_degree=k)
