"""Gauge locus, holonomy, horn fillers and the Lie-algebra adapter.

A Lie algebra g (graded, with differential) is placed in the shifted
convention used everywhere else by the single pair :func:`wrap_lie` /
:func:`unwrap_lie`: a vector of Lie degree k gets degree k - 1, and

    {x} = (-1)^|x| dx,      {x, y} = (-1)^|x| [x, y],

with |x| the shifted degree.  For g in Lie degree 0 this gives
{x, y} = -[x, y], and A in Omega^1 (x) g is Maurer-Cartan exactly when
dA + (1/2)[A, A] = 0.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .dupont import (
    FaceGrading,
    dupont_s,
    faces,
    monomials,
    project_p,
    whitney_coefficients,
    whitney_form,
)
from .forms import AffineSimplexMap, FormError, FormFamily, PolyForm, d, eval_vertex, extend_section, poincare_h
from .linf import AlgebraError, CurvedLinfPresentation, LinfMorphism, curvature_residual
from .perturb import Contraction, Transfer, mc_section
from .tensor import FormValuedElement, TensorAlgebra, mc_residual_on_simplex, restrict
from .vectors import LinearOp, Vector, add_into, add_term, to_fraction
from . import words as W


class HolonomyError(ValueError):
    pass


# ------------------------------------------------------------------ Lie adapter


@dataclass(frozen=True)
class LieAlgebra:
    """Nilpotent graded Lie algebra: basis (name, lie_degree, weight), [a, b] and d."""

    basis: tuple
    bracket: dict
    differential: dict
    cutoff: int

    def deg(self, k):
        return self._table[k][0]

    @property
    def _table(self):
        return {b[0]: (b[1], b[2]) for b in self.basis}

    def lie_bracket(self, x: Mapping, y: Mapping) -> Vector:
        """[x, y] extended bilinearly, with [b, a] = -(-1)^{|a||b|}[a, b]."""
        tab = self._table
        out: Vector = {}
        for a, ca in x.items():
            for b, cb in y.items():
                if (a, b) in self.bracket:
                    add_into(out, self.bracket[(a, b)], ca * cb)
                elif (b, a) in self.bracket:
                    sign = -((-1) ** (tab[a][0] * tab[b][0]))
                    add_into(out, self.bracket[(b, a)], sign * ca * cb)
        return {k: c for k, c in out.items() if tab[k][1] <= self.cutoff}


def lie_algebra(basis: Sequence, bracket: Mapping, differential: Mapping | None = None, cutoff: int | None = None) -> LieAlgebra:
    basis = tuple((str(n), int(dg), int(w)) for n, dg, w in basis)
    if cutoff is None:
        cutoff = max(w for _, _, w in basis)
    br = {tuple(k): {kk: to_fraction(c) for kk, c in v.items()} for k, v in bracket.items()}
    diff = {k: {kk: to_fraction(c) for kk, c in v.items()} for k, v in (differential or {}).items()}
    return LieAlgebra(basis, br, diff, cutoff)


def wrap_lie(g: LieAlgebra) -> CurvedLinfPresentation:
    """The shifted presentation: degree k - 1, {x} = (-1)^|x| dx, {x,y} = (-1)^|x| [x,y]."""
    basis = [(n, dg - 1, w) for n, dg, w in g.basis]
    shifted = {n: dg - 1 for n, dg, _ in g.basis}
    brackets: dict = {}
    for a, v in g.differential.items():
        brackets[(a,)] = {k: (-1) ** (shifted[a] % 2) * c for k, c in v.items()}
    names = [b[0] for b in g.basis]
    for a, b in itertools.combinations_with_replacement(names, 2):
        val = g.lie_bracket({a: Fraction(1)}, {b: Fraction(1)})
        if val:
            brackets[(a, b)] = {k: (-1) ** (shifted[a] % 2) * c for k, c in val.items()}
    return CurvedLinfPresentation(basis, brackets, g.cutoff)


def unwrap_lie(L: CurvedLinfPresentation) -> LieAlgebra:
    """Inverse of :func:`wrap_lie` for presentations with brackets of arity 1 and 2 only."""
    basis = tuple((b.name, b.deg + 1, b.weight) for b in L.basis)
    bracket, diff = {}, {}
    for word, vec in L.structure_constants().items():
        sign = (-1) ** (L.deg(word[0]) % 2) if word else 1
        if len(word) == 1:
            diff[word[0]] = {k: sign * c for k, c in vec.items()}
        elif len(word) == 2:
            bracket[word] = {k: sign * c for k, c in vec.items()}
        else:
            raise AlgebraError("only dg Lie presentations can be unwrapped")
    return LieAlgebra(basis, bracket, diff, L.cutoff)


def heisenberg() -> LieAlgebra:
    """[X, Y] = Z with weights 1, 1, 2."""
    return lie_algebra([("X", 0, 1), ("Y", 0, 1), ("Z", 0, 2)], {("X", "Y"): {"Z": 1}})


def free_nilpotent_3() -> LieAlgebra:
    """Free 3-step nilpotent Lie algebra on X, Y: Z = [X,Y], U = [X,Z], V = [Y,Z]."""
    return lie_algebra(
        [("X", 0, 1), ("Y", 0, 1), ("Z", 0, 2), ("U", 0, 3), ("V", 0, 3)],
        {("X", "Y"): {"Z": 1}, ("X", "Z"): {"U": 1}, ("Y", "Z"): {"V": 1}},
    )


def cone(g: LieAlgebra, suffix: str = "'") -> LieAlgebra:
    """C g: g in degree 0, a copy g' in degree -1, d(a') = a, [a, b'] = [a, b]'."""
    if any(dg != 0 for _, dg, _ in g.basis):
        raise AlgebraError("the cone is built on a Lie algebra concentrated in degree 0")
    basis = list(g.basis) + [(n + suffix, -1, w) for n, _, w in g.basis]
    bracket = dict(g.bracket)
    for (a, b), v in g.bracket.items():
        bracket[(a, b + suffix)] = {k + suffix: c for k, c in v.items()}
        bracket[(b, a + suffix)] = {k + suffix: -c for k, c in v.items()}
    diff = {n + suffix: {n: Fraction(1)} for n, _, _ in g.basis}
    return LieAlgebra(tuple(basis), bracket, diff, g.cutoff)


# ------------------------------------------------------------------ BCH oracle

_BCH_TERMS = {
    # weight: list of (coefficient, nested bracket shape) with shapes as words
    # in x, y read as right-nested brackets [a1, [a2, ... [a_{k-1}, a_k]]]
    1: [(Fraction(1), "x"), (Fraction(1), "y")],
    2: [(Fraction(1, 2), "xy")],
    3: [(Fraction(1, 12), "xxy"), (Fraction(1, 12), "yyx")],
    4: [(Fraction(-1, 24), "yxxy")],
}


def bch_oracle(bracket: Callable[[Mapping, Mapping], Mapping], x: Mapping, y: Mapping, depth: int = 4) -> Vector:
    """Truncated BCH series log(e^x e^y) through bracket length ``depth`` (<= 4)."""
    if depth > 4:
        raise ValueError("BCH terms are implemented through length 4")
    elems = {"x": dict(x), "y": dict(y)}
    out: Vector = {}
    for w in range(1, depth + 1):
        for coef, shape in _BCH_TERMS[w]:
            val = elems[shape[-1]]
            for letter in reversed(shape[:-1]):
                val = bracket(elems[letter], val)
            add_into(out, val, coef)
    return out


# ------------------------------------------------------- Dupont tensored with L


class TensorFaceGrading:
    """Keys (name, face) of W_n (x) L."""

    def __init__(self, L, n: int):
        self.L = L
        self.n = n
        self.cutoff = L.cutoff

    def deg(self, key):
        return self.L.deg(key[0]) + len(key[1]) - 1

    def weight(self, key):
        return self.L.weight(key[0])

    def keys(self):
        return [(b, f) for b in self.L.keys() for f in faces(self.n)]

    def __contains__(self, key):
        return key in set(self.keys())


def _form(n, exp, ds):
    return PolyForm._raw(n, {(exp, ds): Fraction(1)})


def dupont_tensor_contraction(L, n: int) -> Contraction:
    """(Omega_n (x) L, D, W_n (x) L, d, p (x) 1, i (x) 1, s (x) 1).

    D is d (x) 1 plus the weight-preserving part of the unary bracket, with
    the Koszul sign (-1)^{form degree}.
    """
    T = TensorAlgebra(L, n)

    def D(key):
        name, exp, ds = key
        out: Vector = {}
        for (e2, d2), c in d(_form(n, exp, ds)).terms.items():
            out[(name, e2, d2)] = c
        sign = -1 if len(ds) % 2 else 1
        for b, c in L.graded_unary(name).items():
            add_term(out, (b, exp, ds), sign * c)
        return out

    def p(key):
        name, exp, ds = key
        return {(name, f): c for f, c in whitney_coefficients(n, _form(n, exp, ds)).items()}

    def i(key):
        name, face = key
        return {(name, e, ds): c for (e, ds), c in whitney_form(face, n).terms.items()}

    def h(key):
        name, exp, ds = key
        return {(name, e, d2): c for (e, d2), c in dupont_s(n, _form(n, exp, ds)).terms.items()}

    Dop, pop, iop = LinearOp(D, "D"), LinearOp(p, "p"), LinearOp(i, "i")
    dW = LinearOp(lambda key: pop(Dop(iop.key(key))), "d")
    return Contraction(T, TensorFaceGrading(L, n), Dop, dW, pop, iop, LinearOp(h, "s"), name=f"dupont{n}(x)L")


class GaugeTransfer:
    """Cached transfer data for Omega_n (x) L along the Dupont contraction."""

    _cache: dict = {}

    def __init__(self, L, n: int):
        self.L = L
        self.n = n
        self.T = TensorAlgebra(L, n)
        self.c = dupont_tensor_contraction(L, n)
        self.transfer = Transfer(self.T, self.c)

    @classmethod
    def get(cls, L, n: int) -> "GaugeTransfer":
        key = (id(L), n)
        hit = cls._cache.get(key)
        if hit is None or hit.L is not L:
            hit = cls(L, n)
            cls._cache[key] = hit
        return hit

    def residual(self, z: Mapping) -> Vector:
        return curvature_residual(self.T, z)


# ------------------------------------------------------------------ gamma and rho


def _check_mc(L, x: FormValuedElement):
    res = mc_residual_on_simplex(x.n, L, x)
    if res:
        raise HolonomyError(f"not a Maurer-Cartan element: residual {res}")


def gamma_check(L, x: FormValuedElement) -> bool:
    """True iff s_n vanishes on every coefficient of x."""
    return all(not dupont_s(x.n, f) for f in x.coeffs.values())


def is_thin(x: FormValuedElement) -> bool:
    """True iff the component of top form degree vanishes."""
    if x.n == 0:
        return True
    return not x.form_component(x.n)


def whitney_part(x: FormValuedElement) -> dict:
    """p_n applied coefficientwise, as {(name, face): coefficient}."""
    out = {}
    for name, f in x.coeffs.items():
        for face, c in whitney_coefficients(x.n, f).items():
            out[(name, face)] = c
    return out


def from_whitney(L, n: int, y: Mapping) -> FormValuedElement:
    vec: Vector = {}
    for (name, face), c in y.items():
        for (e, ds), v in whitney_form(tuple(face), n).terms.items():
            add_term(vec, (name, e, ds), c * v)
    return FormValuedElement.from_vector(n, vec)


def pushforward_simplex(L, x: FormValuedElement, check: bool = True) -> dict:
    """MC(p_mu) x in W_n (x) L."""
    if check:
        _check_mc(L, x)
    gt = GaugeTransfer.get(L, x.n)
    return gt.transfer.pushforward(x.to_vector())


def section_simplex(L, n: int, y: Mapping) -> FormValuedElement:
    """MC(i_mu) y, computed as the fixed point z = i y - s(R z)."""
    gt = GaugeTransfer.get(L, n)
    z = mc_section(gt.T, gt.c, dict(y), residual=gt.residual)
    return FormValuedElement.from_vector(n, z)


def rho(L, x: FormValuedElement, check: bool = True) -> FormValuedElement:
    """The holonomy retraction onto the gauge locus: MC(i_mu) MC(p_mu) x."""
    y = pushforward_simplex(L, x, check)
    return section_simplex(L, x.n, y)


def gamma_morphism(f: LinfMorphism, n: int, y: Mapping) -> dict:
    """(W_n (x) f) on Whitney data for a strict morphism f."""
    if not f.strict:
        raise HolonomyError("only strict morphisms act facewise on Whitney data")
    out: dict = {}
    for (name, face), c in y.items():
        for k, v in f.component((name,)).items():
            add_term(out, (k, face), c * v)
    return out


def apply_strict(f: LinfMorphism, x: FormValuedElement) -> FormValuedElement:
    """MC(f) on simplices for a strict morphism: apply f_(1) to the coefficients."""
    if not f.strict:
        raise HolonomyError("only strict morphisms act coefficientwise")
    coeffs: dict = {}
    for name, form in x.coeffs.items():
        for k, c in f.component((name,)).items():
            coeffs[k] = coeffs[k] + form.scale(c) if k in coeffs else form.scale(c)
    return FormValuedElement(x.n, coeffs)


# ------------------------------------------------------------------ horn filling


def _family(n: int, missing: int, faces_: Mapping[int, FormValuedElement], name: str) -> FormFamily:
    fam = {}
    for j, y in faces_.items():
        fam[j] = y.coeffs.get(name, PolyForm.zero(n - 1))
    return FormFamily(n, fam, shape="horn", missing=missing)


def _combined_homotopy(n: int, i: int) -> Callable[[PolyForm], PolyForm]:
    def P(a: PolyForm) -> PolyForm:
        return project_p(n, poincare_h(i, a)) + dupont_s(n, a)

    return P


@functools.lru_cache(maxsize=None)
def combined_homotopy_failures(n: int, i: int, degree: int = 3) -> tuple:
    """Monomials of polynomial degree <= ``degree`` where dP + Pd != 1 - eps^i."""
    P = _combined_homotopy(n, i)
    bad = []
    for exp, ds in monomials(n, degree):
        a = _form(n, exp, ds)
        lhs = d(P(a)) + P(d(a))
        if lhs != a - PolyForm.const(n, eval_vertex(i, a)):
            bad.append((exp, ds))
    return tuple(bad)


def horn_extension(L, n: int, i: int, faces_: Mapping[int, FormValuedElement]) -> FormValuedElement:
    """An extension xi of the horn with s xi = 0 when the horn lies in gamma, and zero top integral.

    xi = sigma y - d(s sigma y - sigma(s y)) - c omega_{0..n}, where c is the
    top Whitney coefficient; both corrections vanish on the horn.
    """
    names = sorted({k for y in faces_.values() for k in y.coeffs})
    top = tuple(range(n + 1))
    coeffs = {}
    for name in names:
        fam = _family(n, i, faces_, name)
        bad = fam.incompatibilities()
        if bad:
            raise HolonomyError(f"horn faces disagree on shared subfaces {bad} (coefficient {name})")
        sy = extend_section(fam)
        s_fam = FormFamily(n, {j: dupont_s(n - 1, f) for j, f in fam.faces.items()}, shape="horn", missing=i)
        eta = dupont_s(n, sy) - extend_section(s_fam)
        xi = sy - d(eta)
        c = whitney_coefficients(n, xi).get(top, 0)
        if c:
            xi = xi - whitney_form(top, n).scale(c)
        coeffs[name] = xi
    return FormValuedElement(n, coeffs)


def _unary_part(L, x: FormValuedElement) -> FormValuedElement:
    """alpha (x) b -> (-1)^{|alpha|} alpha (x) {b}: the L-differential on coefficients."""
    vec: Vector = {}
    for (name, exp, ds), c in x.to_vector().items():
        sign = -1 if len(ds) % 2 else 1
        for b, v in L.bracket_word((name,)).items():
            add_term(vec, (b, exp, ds), sign * c * v)
    return FormValuedElement.from_vector(x.n, vec)


def _nonlinear_part(T, x: Vector) -> Vector:
    """Curvature plus the brackets of arity >= 2 in sum_k (1/k!){x^k}."""
    out: Vector = {}
    for w, c in W.exp_vector(T, x).items():
        if len(w) != 1:
            add_into(out, T.bracket_word(w), c)
    return out


def fill_horn(
    L,
    n: int,
    i: int,
    faces_: Mapping[int, FormValuedElement],
    extension: FormValuedElement | None = None,
    check: bool = True,
) -> FormValuedElement:
    """Fill the horn Lambda^n_i (faces indexed by j != i) by the gauge-fixed iteration.

    With P = p h^i + s and xi an extension of the horn,
        x_0 = eps^i y + d(P xi) + U(P xi),   x_{k+1} = x_0 - P(R(x_k)),
    where U is the L-differential acting on coefficients and R collects the
    curvature and the brackets of arity >= 2.  The loop runs ``cutoff``
    times; the result is checked for the Maurer-Cartan equation and for
    restricting to the given faces.
    """
    if not 0 < i <= n:
        raise HolonomyError(f"horn index {i} must satisfy 0 < i <= {n}")
    if set(faces_) != set(range(n + 1)) - {i}:
        raise HolonomyError(f"horn faces must be exactly {sorted(set(range(n + 1)) - {i})}")
    for j, y in faces_.items():
        if y.n != n - 1:
            raise HolonomyError(f"face {j} lives on the {y.n}-simplex, expected {n - 1}")
        if check:
            res = mc_residual_on_simplex(n - 1, L, y)
            if res:
                raise HolonomyError(f"face {j} is not a Maurer-Cartan element")
    if n <= 3 and combined_homotopy_failures(n, i):
        raise HolonomyError(f"dP + Pd != 1 - eps^{i} on the {n}-simplex")
    xi = extension if extension is not None else horn_extension(L, n, i, faces_)
    P = _combined_homotopy(n, i)
    T = TensorAlgebra(L, n)
    # eps^i y: the value at vertex i, read off any face containing it
    j0 = min(faces_)
    vi = i if i < j0 else i - 1
    eps = {name: eval_vertex(vi, f) for name, f in faces_[j0].coeffs.items()}
    Pxi = xi.map_forms(P)
    x0 = FormValuedElement(n, {k: PolyForm.const(n, v) for k, v in eps.items()})
    x0 = x0 + Pxi.map_forms(d) + _unary_part(L, Pxi)
    x = x0
    for _ in range(L.cutoff + 1):
        R = FormValuedElement.from_vector(n, _nonlinear_part(T, x.to_vector()))
        new = x0 - R.map_forms(P)
        if new == x:
            break
        x = new
    else:
        raise HolonomyError("filler iteration did not stabilise within the cutoff")
    if check:
        res = mc_residual_on_simplex(n, L, x, T)
        if res:
            raise HolonomyError("filler is not a Maurer-Cartan element")
        for j, y in faces_.items():
            if restrict(x, AffineSimplexMap.face(n, j)) != y:
                raise HolonomyError(f"filler does not restrict to face {j}")
    return x


def horn_from_simplex(x: FormValuedElement, i: int) -> dict:
    return {j: restrict(x, AffineSimplexMap.face(x.n, j)) for j in range(x.n + 1) if j != i}


def edge(L, n: int, vec: Mapping) -> FormValuedElement:
    """The Whitney 1-simplex omega_01 (x) vec."""
    return FormValuedElement(1, {k: whitney_form((0, 1), 1).scale(to_fraction(c)) for k, c in vec.items()})


def edge_value(x: FormValuedElement) -> Vector:
    """Coefficient of omega_01 in a 1-simplex of the gauge locus."""
    out = {}
    for name, f in x.coeffs.items():
        c = whitney_coefficients(1, f).get((0, 1), 0)
        if c:
            out[name] = c
    return out


def compose_edges(L, a: Mapping, b: Mapping) -> Vector:
    """Third edge of the thin filler of Lambda^2_1 with edges a (01) and b (12)."""
    faces_ = {2: edge(L, 1, a), 0: edge(L, 1, b)}
    x = fill_horn(L, 2, 1, faces_)
    return edge_value(restrict(x, AffineSimplexMap.face(2, 1)))
