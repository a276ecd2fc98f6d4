"""The curved L-infinity algebra of L-valued polynomial forms on a simplex.

Basis keys of Omega_n (x) L are triples ``(name, exp, ds)``: an L-basis
name and a normal-form monomial of Omega_n.  Total degree is the form
degree plus the degree of the name; weights come from L alone.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .forms import AffineSimplexMap, FormError, PolyForm, _mono_mul, d, pullback
from .linf import bracket_vectors, curvature_residual
from .vectors import Vector, add_into, add_term, to_fraction


class TensorAlgebra:
    """Omega_n (x) L with the induced brackets."""

    def __init__(self, L, n: int):
        if n < 0:
            raise FormError("simplex dimension must be non-negative")
        self.L = L
        self.n = n
        self.cutoff = L.cutoff
        self._cache: dict = {}
        self._zero = (0,) * n

    def deg(self, key) -> int:
        return self.L.deg(key[0]) + len(key[2])

    def weight(self, key) -> int:
        return self.L.weight(key[0])

    def form_degree(self, key) -> int:
        return len(key[2])

    def bracket_word(self, word: tuple) -> Vector:
        try:
            return self._cache[word]
        except KeyError:
            val = self._bracket(word)
            self._cache[word] = val
            return val

    def _bracket(self, word: tuple) -> Vector:
        L, z = self.L, self._zero
        out: Vector = {}
        if not word:
            for b, c in L.curvature().items():
                out[(b, z, ())] = c
            return out
        if len(word) == 1:
            name, exp, ds = word[0]
            for (e2, d2), c in d(PolyForm._raw(self.n, {(exp, ds): Fraction(1)})).terms.items():
                add_term(out, (name, e2, d2), c)
            sign = -1 if len(ds) % 2 else 1
            for b, c in L.bracket_word((name,)).items():
                add_term(out, (b, exp, ds), sign * c)
            return out
        # (-1)^{sum_j |alpha_j| + sum_{i<j} |x_i| |alpha_j|} alpha_1 ... alpha_k (x) {x_1, ..., x_k};
        # the first sign moves the odd bracket past the forms, as in arity 1
        parity = 0
        mono = (z, ())
        names = []
        coef = 1
        for j, (name, exp, ds) in enumerate(word):
            a = len(ds) % 2
            if a:
                parity += 1 + sum(L.deg(word[i][0]) for i in range(j))
            sign, mono = _mono_mul(mono, (exp, ds))
            if not sign:
                return {}
            coef *= sign
            names.append(name)
        if parity % 2:
            coef = -coef
        vec = bracket_vectors(L, [{nm: Fraction(1)} for nm in names])
        for b, c in vec.items():
            add_term(out, (b, mono[0], mono[1]), coef * c)
        return out


class FormValuedElement:
    """An element of Omega_n (x) L: one PolyForm per basis name of L."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[str, PolyForm] | None = None):
        self.n = n
        self.coeffs: dict[str, PolyForm] = {}
        for name, form in (coeffs or {}).items():
            if not isinstance(form, PolyForm):
                form = PolyForm.const(n, form)
            if form.n != n:
                raise FormError(f"coefficient of {name} lives on the {form.n}-simplex, expected {n}")
            if form:
                self.coeffs[name] = form

    @classmethod
    def from_vector(cls, n: int, vec: Mapping) -> "FormValuedElement":
        terms: dict[str, dict] = {}
        for (name, exp, ds), c in vec.items():
            add_term(terms.setdefault(name, {}), (exp, ds), c)
        return cls(n, {k: PolyForm._raw(n, v) for k, v in terms.items() if v})

    def to_vector(self) -> Vector:
        out: Vector = {}
        for name, form in self.coeffs.items():
            for (exp, ds), c in form.terms.items():
                out[(name, exp, ds)] = c
        return out

    def __eq__(self, other):
        return isinstance(other, FormValuedElement) and self.n == other.n and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v.pretty()}" for k, v in sorted(self.coeffs.items()))
        return f"FormValuedElement({self.n}, {{{inner}}})"

    def __add__(self, other: "FormValuedElement") -> "FormValuedElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return FormValuedElement(self.n, out)

    def __neg__(self):
        return FormValuedElement(self.n, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormValuedElement":
        return FormValuedElement(self.n, {k: v.scale(c) for k, v in self.coeffs.items()})

    def map_forms(self, fn) -> "FormValuedElement":
        return FormValuedElement(self.n, {k: fn(v) for k, v in self.coeffs.items()})

    def total_degrees(self, L) -> set[int]:
        return {L.deg(k) + fd for k, v in self.coeffs.items() for fd in v.degrees()}

    def form_component(self, k: int) -> "FormValuedElement":
        """The part of form degree k."""
        return FormValuedElement(self.n, {name: v.component(k) for name, v in self.coeffs.items()})

    def weight(self, L) -> int:
        return min((L.weight(k) for k in self.coeffs), default=L.cutoff + 1)

    def to_json(self) -> dict:
        return {name: form.to_json() for name, form in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "FormValuedElement":
        coeffs = {}
        for name, fj in data.items():
            form = PolyForm.from_json(fj)
            if form.n != n:
                raise FormError(f"coefficient of {name} lives on the {form.n}-simplex, expected {n}")
            coeffs[name] = form
        return cls(n, coeffs)


def constant_element(n: int, x: Mapping) -> FormValuedElement:
    """The constant form with values x (a vector of L)."""
    return FormValuedElement(n, {k: PolyForm.const(n, to_fraction(c)) for k, c in x.items()})


def bracket_tensor(n: int, L, elements: Sequence[FormValuedElement]) -> FormValuedElement:
    for x in elements:
        if x.n != n:
            raise FormError(f"element on the {x.n}-simplex passed to a bracket on the {n}-simplex")
    T = TensorAlgebra(L, n)
    return FormValuedElement.from_vector(n, bracket_vectors(T, [x.to_vector() for x in elements]))


def mc_residual_on_simplex(n: int, L, x: FormValuedElement, algebra: TensorAlgebra | None = None) -> FormValuedElement:
    """sum_k (1/k!) {x, ..., x} in Omega_n (x) L."""
    if x.n != n:
        raise FormError(f"element on the {x.n}-simplex, expected {n}")
    if x and x.total_degrees(L) != {0}:
        raise FormError("Maurer-Cartan elements have total degree 0")
    T = algebra if algebra is not None else TensorAlgebra(L, n)
    return FormValuedElement.from_vector(n, curvature_residual(T, x.to_vector()))


def restrict(x: FormValuedElement, m: AffineSimplexMap) -> FormValuedElement:
    """Coefficient-wise pullback along an affine simplex map."""
    if m.target != x.n:
        raise FormError(f"map into the {m.target}-simplex applied to an element on the {x.n}-simplex")
    return FormValuedElement(m.source, {k: pullback(m, v) for k, v in x.coeffs.items()})


def face_restriction(x: FormValuedElement, j: int) -> FormValuedElement:
    return restrict(x, AffineSimplexMap.face(x.n, j))
