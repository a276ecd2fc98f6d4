"""Whitney elementary forms and Dupont's contraction of the simplex forms.

The Whitney forms span a copy of the normalized simplicial cochains inside
the polynomial forms.  ``project_p`` is the projection onto that copy and
``dupont_s`` the homotopy with d s + s d = 1 - p.  Both are evaluated as
sums of composites of vertex evaluations and dilation homotopies, one
operator term per nondegenerate face.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence

from .forms import FormError, PolyForm, d, eval_vertex, poincare_h, wedge
from .vectors import add_into, add_term, fraction_str, to_fraction


def faces(n: int, max_dim: int | None = None) -> list[tuple[int, ...]]:
    """Nondegenerate faces of the n-simplex as increasing vertex tuples."""
    top = n if max_dim is None else max_dim
    return [f for k in range(top + 1) for f in itertools.combinations(range(n + 1), k + 1)]


def _check_face(face: Sequence[int], n: int) -> tuple:
    face = tuple(face)
    if not face or any(b <= a for a, b in zip(face, face[1:])) or face[0] < 0 or face[-1] > n:
        raise FormError(f"{face} is not an increasing vertex sequence in 0..{n}")
    return face


@lru_cache(maxsize=None)
def whitney_form(face: tuple, n: int) -> PolyForm:
    """k! sum_j (-1)^j t_{i_j} dt_{i_0} ... (omit j) ... dt_{i_k}."""
    face = _check_face(face, n)
    k = len(face) - 1
    out = PolyForm.zero(n)
    for j, v in enumerate(face):
        term = PolyForm.t(n, v)
        for w in face[:j] + face[j + 1:]:
            term = wedge(term, PolyForm.dt(n, w))
        out = out + (term if j % 2 == 0 else -term)
    return out.scale(factorial(k))


def whitney_coefficient(face: tuple, a: PolyForm) -> Fraction:
    """eps^{i_k} h^{i_{k-1}} ... h^{i_0} applied to a: the integral of a over the face."""
    f = a
    for v in face[:-1]:
        f = poincare_h(v, f)
        if not f:
            return Fraction(0)
    return eval_vertex(face[-1], f)


def whitney_coefficients(n: int, a: PolyForm) -> dict[tuple, Fraction]:
    """Coordinates of p_n(a) in the Whitney basis."""
    out = {}
    for face in faces(n):
        k = len(face) - 1
        if k not in a.degrees():
            continue
        c = whitney_coefficient(face, a.component(k))
        if c:
            out[face] = c
    return out


def project_p(n: int, a: PolyForm) -> PolyForm:
    """Projection of the polynomial forms onto the Whitney forms."""
    if a.n != n:
        raise FormError(f"form lives on the {a.n}-simplex, expected {n}")
    out = PolyForm.zero(n)
    for face, c in whitney_coefficients(n, a).items():
        out = out + whitney_form(face, n).scale(c)
    return out


def dupont_terms(n: int) -> list[tuple]:
    """Faces indexing the operator summands of s_n (all faces of dimension < n)."""
    return faces(n, n - 1) if n else []


def dupont_s(n: int, a: PolyForm) -> PolyForm:
    """Dupont's homotopy: sum over faces of (-1)^k omega_F h^{i_k} ... h^{i_0}."""
    if a.n != n:
        raise FormError(f"form lives on the {a.n}-simplex, expected {n}")
    out = PolyForm.zero(n)
    for face in dupont_terms(n):
        f = a
        for v in face:
            f = poincare_h(v, f)
            if not f:
                break
        if f:
            term = wedge(whitney_form(face, n), f)
            out = out + (term if len(face) % 2 else -term)
    return out


class WhitneyElement:
    """A cochain on the n-simplex, i.e. a combination of Whitney forms."""

    def __init__(self, n: int, coeffs: Mapping[tuple, object] | None = None):
        self.n = n
        self.coeffs: dict = {}
        for face, c in (coeffs or {}).items():
            add_term(self.coeffs, _check_face(face, n), to_fraction(c))

    @classmethod
    def from_form(cls, a: PolyForm) -> "WhitneyElement":
        return cls(a.n, whitney_coefficients(a.n, a))

    def to_form(self) -> PolyForm:
        out = PolyForm.zero(self.n)
        for face, c in self.coeffs.items():
            out = out + whitney_form(face, self.n).scale(c)
        return out

    def coboundary(self) -> "WhitneyElement":
        """Simplicial coboundary: (dc)(F) = sum_j (-1)^j c(F minus its j-th vertex)."""
        acc: dict = {}
        for face, c in self.coeffs.items():
            for v in range(self.n + 1):
                if v in face:
                    continue
                big = tuple(sorted(face + (v,)))
                add_term(acc, big, (-1) ** big.index(v) * c)
        return WhitneyElement(self.n, acc)

    def __eq__(self, other):
        return isinstance(other, WhitneyElement) and (self.n, self.coeffs) == (other.n, other.coeffs)

    def __repr__(self):
        return f"WhitneyElement({self.n}, {self.coeffs})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "coeffs": [
                {"face": list(f), "coef": fraction_str(c)} for f, c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WhitneyElement":
        return cls(int(data["n"]), {tuple(e["face"]): e["coef"] for e in data.get("coeffs", [])})


class FormGrading:
    """Monomial keys (exp, ds) of the n-simplex forms, graded by form degree."""

    cutoff = 0

    def __init__(self, n: int):
        self.n = n

    def deg(self, key) -> int:
        return len(key[1])

    def weight(self, key) -> int:
        return 0


class FaceGrading:
    """Face keys of the Whitney complex, graded by face dimension."""

    cutoff = 0

    def __init__(self, n: int):
        self.n = n

    def deg(self, key) -> int:
        return len(key) - 1

    def weight(self, key) -> int:
        return 0

    def keys(self) -> list:
        return faces(self.n)

    def __contains__(self, key) -> bool:
        return key in set(faces(self.n))


def monomials(n: int, max_degree: int) -> list[tuple]:
    """All normal-form monomial keys of polynomial degree <= max_degree."""
    out = []
    for total in range(max_degree + 1):
        for exp in itertools.product(range(total + 1), repeat=n):
            if sum(exp) != total:
                continue
            for k in range(n + 1):
                for ds in itertools.combinations(range(1, n + 1), k):
                    out.append((exp, ds))
    return out


def dupont_contraction(n: int, verify_degree: int = 2):
    """The contraction (Omega_n, d, W_n, coboundary, p_n, i_n, s_n).

    The identities and the side conditions s^2 = ps = si = 0 are checked on
    all monomials of polynomial degree <= ``verify_degree`` and on every
    face; a failure raises :class:`~mcholonomy.perturb.ContractionError`.
    """
    from .perturb import Contraction
    from .vectors import LinearOp

    def form_of(key):
        return PolyForm._raw(n, {key: Fraction(1)})

    D = LinearOp(lambda k: d(form_of(k)).terms, "d")
    cob = LinearOp(lambda f: WhitneyElement(n, {f: 1}).coboundary().coeffs, "delta")
    p = LinearOp(lambda k: whitney_coefficients(n, form_of(k)), "p")
    i = LinearOp(lambda f: whitney_form(f, n).terms, "i")
    s = LinearOp(lambda k: dupont_s(n, form_of(k)).terms, "s")
    c = Contraction(FormGrading(n), FaceGrading(n), D, cob, p, i, s, name=f"dupont{n}")
    if verify_degree is not None:
        c.verify(monomials(n, verify_degree), faces(n))
    return c


def p_rank(n: int, max_degree: int = 2) -> int:
    """Rank of p_n on the monomials of degree <= max_degree (exact, via sympy)."""
    import sympy

    cols = [whitney_coefficients(n, PolyForm._raw(n, {m: Fraction(1)})) for m in monomials(n, max_degree)]
    fs = faces(n)
    mat = sympy.Matrix([[sympy.Rational(col.get(f, 0)) for col in cols] for f in fs])
    return mat.rank()
