import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mcholonomy.dupont import monomials
from mcholonomy.forms import (
    AffineSimplexMap,
    FormError,
    FormFamily,
    PolyForm,
    d,
    eval_vertex,
    extend_section,
    poincare_h,
    pullback,
    restrict_to_face,
    wedge,
)

from oracles import top_integral
from strategies import forms, homogeneous


def T(n, i):
    return PolyForm.t(n, i)


def dT(n, i):
    return PolyForm.dt(n, i)


def mono(n, exp, ds):
    return PolyForm._raw(n, {(exp, ds): Fraction(1)})


# ---------------------------------------------------------------- normal form


def test_index_zero_is_eliminated():
    assert T(2, 0) == PolyForm.const(2, 1) - T(2, 1) - T(2, 2)
    assert dT(2, 0) == -(dT(2, 1) + dT(2, 2))
    assert all(len(exp) == 2 for exp, _ in (T(2, 0) * dT(2, 0)).terms)


def test_zero_coefficients_are_not_stored():
    a = T(1, 1) - T(1, 1)
    assert a.terms == {} and not a


def test_json_round_trip():
    a = (T(2, 0) * dT(2, 1)).scale(Fraction(1, 2)) + T(2, 2)
    assert PolyForm.from_json(a.to_json()) == a


def test_json_accepts_unsorted_differentials():
    data = {"n": 2, "terms": [{"exp": [0, 0], "ds": [2, 1], "coef": "1"}]}
    assert PolyForm.from_json(data) == -(dT(2, 1) * dT(2, 2))


# ---------------------------------------------------------------- wedge and d


def test_wedge_examples():
    assert dT(1, 1) * dT(1, 1) == PolyForm.zero(1)
    assert T(1, 1) * dT(1, 1) == mono(1, (1,), (1,))
    lhs = wedge(T(2, 0) * dT(2, 1), T(2, 1) * dT(2, 2))
    assert lhs == T(2, 0) * T(2, 1) * dT(2, 1) * dT(2, 2)
    # t0 t1 = t1 - t1^2 - t1 t2
    expected = mono(2, (1, 0), (1, 2)) - mono(2, (2, 0), (1, 2)) - mono(2, (1, 1), (1, 2))
    assert lhs == expected


def test_dimension_mismatch_is_an_error():
    with pytest.raises(FormError):
        wedge(T(1, 1), T(2, 1))


def test_d_examples():
    assert d(T(1, 1)) == dT(1, 1)
    assert d(T(1, 1) * (PolyForm.const(1, 1) - T(1, 1))) == (PolyForm.const(1, 1) - T(1, 1).scale(2)) * dT(1, 1)
    assert d(d(T(2, 1) * T(2, 2))) == PolyForm.zero(2)


@given(forms(3))
def test_d_squared_is_zero(a):
    assert d(d(a)) == PolyForm.zero(3)


@given(st.integers(0, 3), st.data())
def test_leibniz_rule(k, data):
    a = data.draw(homogeneous(3, k))
    b = data.draw(forms(3))
    sign = -1 if k % 2 else 1
    assert d(a * b) == d(a) * b + (a * d(b)).scale(sign)


@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_commutativity(k, l, data):
    a = data.draw(homogeneous(2, k))
    b = data.draw(homogeneous(2, l))
    assert a * b == (b * a).scale((-1) ** (k * l))


@given(forms(2), forms(2), forms(2))
def test_wedge_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


# ---------------------------------------------------------------- vertex evaluation


def test_eval_vertex_examples():
    assert eval_vertex(1, T(1, 1)) == 1
    assert eval_vertex(0, dT(1, 1)) == 0
    assert eval_vertex(0, T(1, 0) * T(1, 1) + PolyForm.const(1, 3)) == 3
    with pytest.raises(FormError):
        eval_vertex(2, T(1, 1))


# ---------------------------------------------------------------- Poincare homotopy


def test_poincare_examples():
    assert poincare_h(0, T(1, 1) * T(1, 1)) == PolyForm.zero(1)
    assert poincare_h(0, dT(1, 1)) == T(1, 1)
    assert poincare_h(0, T(1, 1) * dT(1, 1)) == (T(1, 1) * T(1, 1)).scale(Fraction(1, 2))
    with pytest.raises(FormError):
        poincare_h(3, dT(2, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_poincare_homotopy_identity_exhaustive(n):
    for exp, ds in monomials(n, 4):
        a = mono(n, exp, ds)
        for i in range(n + 1):
            lhs = d(poincare_h(i, a)) + poincare_h(i, d(a))
            assert lhs == a - PolyForm.const(n, eval_vertex(i, a)), (i, exp, ds)
            assert poincare_h(i, poincare_h(i, a)) == PolyForm.zero(n)


# ---------------------------------------------------------------- pullback


def test_pullback_examples():
    vertex1 = AffineSimplexMap.vertex(1, 1)
    assert pullback(vertex1, T(1, 1)) == PolyForm.const(0, 1)
    collapse = AffineSimplexMap.collapse(1, 0, {1})
    assert pullback(collapse, T(1, 1)) == PolyForm.zero(1)
    # the codegeneracy hitting vertex 1 twice: t_1 -> t_1 + t_2
    s = AffineSimplexMap.degeneracy(1, 1)
    assert pullback(s, dT(1, 1)) == dT(2, 1) + dT(2, 2)


def test_affine_map_rejects_bad_coordinates():
    with pytest.raises(FormError):
        AffineSimplexMap(1, 1, ((Fraction(1, 2), Fraction(1, 3)), (0, 1)))


@given(forms(2, max_poly=2), st.randoms())
def test_pullback_is_a_dg_algebra_map(a, rnd):
    images = [rnd.randint(0, 2) for _ in range(3)]
    m = AffineSimplexMap.from_vertices(2, images)
    b = (T(2, 1) * dT(2, 2)) + T(2, 0)
    assert pullback(m, d(a)) == d(pullback(m, a))
    assert pullback(m, a * b) == pullback(m, a) * pullback(m, b)


@given(forms(2), st.randoms())
def test_pullback_is_functorial(a, rnd):
    m2 = AffineSimplexMap.from_vertices(2, [rnd.randint(0, 2) for _ in range(4)])
    m1 = AffineSimplexMap.from_vertices(3, [rnd.randint(0, 3) for _ in range(2)])
    assert pullback(m2.compose(m1), a) == pullback(m1, pullback(m2, a))


@given(forms(2, form_degree=2))
def test_stokes_on_the_triangle(a):
    # integral of d(b) over the simplex equals the integral of b over the boundary
    b = PolyForm.monomial(2, (1, 1), (1,)) + a.component(0) * dT(2, 2)
    lhs = top_integral(d(b))
    rhs = Fraction(0)
    for j in range(3):
        face = restrict_to_face(b, j)
        rhs += (-1) ** j * top_integral(face)
    assert lhs == rhs


# ---------------------------------------------------------------- extension


def test_extension_examples():
    fam = FormFamily(1, {0: PolyForm.const(0, 5), 1: PolyForm.const(0, 2)})
    # face 1 is vertex 0, face 0 is vertex 1
    assert extend_section(fam) == T(1, 0).scale(2) + T(1, 1).scale(5)
    const = FormFamily(2, {j: PolyForm.const(1, 7) for j in range(3)})
    assert extend_section(const) == PolyForm.const(2, 7)


def test_incompatible_family_is_rejected():
    fam = FormFamily(2, {0: T(1, 1), 1: PolyForm.zero(1), 2: PolyForm.zero(1)})
    with pytest.raises(FormError):
        extend_section(fam)


@pytest.mark.parametrize("shape", ["boundary", "horn"])
@given(n=st.integers(1, 3), data=st.data())
def test_extension_restricts_to_the_family(shape, n, data):
    a = data.draw(forms(n, max_poly=2))
    missing = data.draw(st.integers(0, n)) if shape == "horn" else None
    fam = FormFamily.restrict(a, shape, missing)
    ext = extend_section(fam)
    for j, f in fam.faces.items():
        assert restrict_to_face(ext, j) == f


def test_extension_is_linear():
    rng = random.Random(4)
    for _ in range(5):
        a = PolyForm.monomial(2, (rng.randint(0, 2), rng.randint(0, 1)), (1,), rng.randint(1, 3))
        b = PolyForm.monomial(2, (rng.randint(0, 1), rng.randint(0, 2)), (), rng.randint(1, 3))
        fa, fb = FormFamily.restrict(a), FormFamily.restrict(b)
        fs = FormFamily.restrict(a + b)
        assert extend_section(fs) == extend_section(fa) + extend_section(fb)
