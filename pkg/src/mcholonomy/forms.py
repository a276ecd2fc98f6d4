"""Polynomial differential forms on the standard n-simplex.

A form on the n-simplex is stored in normal coordinates: the barycentric
coordinate t_0 and its differential are eliminated through
t_0 = 1 - (t_1 + ... + t_n) and dt_0 = -(dt_1 + ... + dt_n), so a term is
keyed by an exponent vector over t_1..t_n and a strictly increasing tuple
of differentials drawn from {1..n}.  Equality of forms is then equality of
dicts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .signs import koszul_sign
from .vectors import add_into, add_term, fraction_str, to_fraction

Monomial = Tuple[Tuple[int, ...], Tuple[int, ...]]


class FormError(ValueError):
    pass


def _merge_ds(a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple]:
    """Wedge two increasing tuples of 1-forms: (sign, merged) or (0, ())."""
    if set(a) & set(b):
        return 0, ()
    seq = list(a) + list(b)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    return koszul_sign([1] * len(seq), order), tuple(seq[j] for j in order)


class PolyForm:
    """An element of the polynomial de Rham algebra of the n-simplex."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, Fraction] | None = None):
        if n < 0:
            raise FormError("simplex dimension must be non-negative")
        self.n = n
        self.terms: Dict[Monomial, Fraction] = {}
        self._hash = None
        for (exp, ds), c in (terms or {}).items():
            if len(exp) != n or any(e < 0 for e in exp):
                raise FormError(f"bad exponent vector {exp!r} for n={n}")
            if any(not 1 <= j <= n for j in ds) or list(ds) != sorted(set(ds)):
                raise FormError(f"differentials {ds!r} not strictly increasing in 1..{n}")
            add_term(self.terms, (tuple(exp), tuple(ds)), to_fraction(c))

    @classmethod
    def _raw(cls, n: int, terms: Dict[Monomial, Fraction]) -> "PolyForm":
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, n: int) -> "PolyForm":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c=1) -> "PolyForm":
        c = to_fraction(c)
        return cls._raw(n, {((0,) * n, ()): c} if c else {})

    @classmethod
    def t(cls, n: int, i: int) -> "PolyForm":
        """Barycentric coordinate t_i, 0 <= i <= n."""
        if not 0 <= i <= n:
            raise FormError(f"coordinate t_{i} out of range on the {n}-simplex")
        if i:
            exp = [0] * n
            exp[i - 1] = 1
            return cls._raw(n, {(tuple(exp), ()): Fraction(1)})
        terms = {((0,) * n, ()): Fraction(1)}
        for j in range(1, n + 1):
            exp = [0] * n
            exp[j - 1] = 1
            terms[(tuple(exp), ())] = Fraction(-1)
        return cls._raw(n, terms)

    @classmethod
    def dt(cls, n: int, i: int) -> "PolyForm":
        if not 0 <= i <= n:
            raise FormError(f"dt_{i} out of range on the {n}-simplex")
        z = (0,) * n
        if i:
            return cls._raw(n, {(z, (i,)): Fraction(1)})
        return cls._raw(n, {(z, (j,)): Fraction(-1) for j in range(1, n + 1)})

    @classmethod
    def monomial(cls, n: int, exp: Sequence[int], ds: Sequence[int] = (), coef=1) -> "PolyForm":
        return cls(n, {(tuple(exp), tuple(ds)): coef})

    # structure

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, PolyForm):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == PolyForm.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return f"PolyForm({self.n}, 0)"
        return f"PolyForm({self.n}, {self.pretty()})"

    def pretty(self) -> str:
        parts = []
        for (exp, ds), c in sorted(self.terms.items()):
            mono = [f"t{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(exp) if e]
            if ds:
                mono.append("^".join(f"dt{j}" for j in ds))
            parts.append(fraction_str(c) + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts)

    def degrees(self) -> set[int]:
        return {len(ds) for (_, ds) in self.terms}

    @property
    def degree(self) -> int:
        """Form degree; only defined for homogeneous nonzero forms."""
        degs = self.degrees()
        if len(degs) != 1:
            raise FormError("degree of a zero or inhomogeneous form is undefined")
        return degs.pop()

    def component(self, k: int) -> "PolyForm":
        return PolyForm._raw(self.n, {m: c for m, c in self.terms.items() if len(m[1]) == k})

    def components(self) -> dict[int, "PolyForm"]:
        return {k: self.component(k) for k in sorted(self.degrees())}

    def poly_degree(self) -> int:
        return max((sum(exp) for exp, _ in self.terms), default=0)

    # vector space

    def _check(self, other: "PolyForm"):
        if not isinstance(other, PolyForm):
            raise TypeError(f"expected PolyForm, got {type(other).__name__}")
        if other.n != self.n:
            raise FormError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyForm.const(self.n, other)
        self._check(other)
        return PolyForm._raw(self.n, add_into(dict(self.terms), other.terms))

    __radd__ = __add__

    def __neg__(self):
        return PolyForm._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyForm.const(self.n, other)
        self._check(other)
        return PolyForm._raw(self.n, add_into(dict(self.terms), other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PolyForm":
        c = to_fraction(c)
        if not c:
            return PolyForm.zero(self.n)
        return PolyForm._raw(self.n, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PolyForm):
            return wedge(self, other)
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        return NotImplemented

    # serialization

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"exp": list(exp), "ds": list(ds), "coef": fraction_str(c)}
                for (exp, ds), c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PolyForm":
        n = int(data["n"])
        terms: dict = {}
        for term in data.get("terms", []):
            exp = tuple(int(e) for e in term["exp"])
            ds = [int(j) for j in term.get("ds", [])]
            if len(exp) != n:
                raise FormError(f"exponent vector {list(exp)} has length != n={n}")
            # accept unsorted differentials, with their sign
            order = sorted(range(len(ds)), key=ds.__getitem__)
            sign = koszul_sign([1] * len(ds), order)
            ds_sorted = tuple(ds[j] for j in order)
            if len(set(ds_sorted)) != len(ds_sorted):
                continue
            if any(not 1 <= j <= n for j in ds_sorted):
                raise FormError(f"differential index out of range 1..{n}: {ds}")
            add_term(terms, (exp, ds_sorted), sign * to_fraction(term["coef"]))
        return cls._raw(n, terms)


def _mono_mul(m1: Monomial, m2: Monomial) -> tuple[int, Monomial]:
    sign, ds = _merge_ds(m1[1], m2[1])
    if not sign:
        return 0, m1
    # moving the differentials of m1 past the (even) polynomial of m2 is free
    return sign, (tuple(a + b for a, b in zip(m1[0], m2[0])), ds)


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    """Graded-commutative product of forms on the same simplex."""
    a._check(b)
    acc: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            sign, m = _mono_mul(m1, m2)
            if sign:
                add_term(acc, m, sign * c1 * c2)
    return PolyForm._raw(a.n, acc)


def wedge_all(forms: Iterable[PolyForm], n: int) -> PolyForm:
    out = PolyForm.const(n, 1)
    for f in forms:
        out = wedge(out, f)
    return out


def d(a: PolyForm) -> PolyForm:
    """Exterior derivative."""
    acc: dict = {}
    for (exp, ds), c in a.terms.items():
        for j, e in enumerate(exp):
            if not e or (j + 1) in ds:
                continue
            sign, nds = _merge_ds((j + 1,), ds)
            nexp = list(exp)
            nexp[j] -= 1
            add_term(acc, (tuple(nexp), nds), sign * e * c)
    return PolyForm._raw(a.n, acc)


def eval_vertex(i: int, a: PolyForm) -> Fraction:
    """Value of the 0-form part of ``a`` at the vertex e_i."""
    if not 0 <= i <= a.n:
        raise FormError(f"vertex {i} out of range on the {a.n}-simplex")
    total = Fraction(0)
    for (exp, ds), c in a.terms.items():
        if ds:
            continue
        if i == 0:
            if not any(exp):
                total += c
        elif all(e == 0 for j, e in enumerate(exp) if j != i - 1):
            total += c
    return total


@lru_cache(maxsize=None)
def _h_monomial(n: int, i: int, exp: tuple, ds: tuple) -> tuple:
    """Poincare homotopy towards vertex i of one monomial, as a term tuple.

    Pull back along (u, t) -> u t + (1 - u) e_i, keep the du-part with du
    moved to the far left, and integrate over u in [0, 1].
    """
    k = len(ds)
    if k == 0:
        return ()
    acc: dict = {}
    if i == 0:
        base, ai, rest = sum(exp), 0, exp
    else:
        ai = exp[i - 1]
        rest = tuple(0 if j == i - 1 else e for j, e in enumerate(exp))
        base = sum(rest)
    for r, s in enumerate(ds):
        sign = -1 if r % 2 else 1
        others = ds[:r] + ds[r + 1:]
        # factor contributed by dt_s: (t_s - delta_{i s}) du
        lin = [((1 if j == s - 1 else 0 for j in range(n)), Fraction(1))]
        if s == i:
            lin.append(((0 for _ in range(n)), Fraction(-1)))
        lin = [(tuple(e), c) for e, c in lin]
        for m in range(ai + 1):
            weight = Fraction(comb(ai, m), base + m + k)
            # (t_i - 1)^m
            for q in range(m + 1):
                coef = weight * comb(m, q) * (-1) ** (m - q)
                pexp = list(rest)
                if i:
                    pexp[i - 1] += q
                for lexp, lc in lin:
                    mexp = tuple(a + b for a, b in zip(pexp, lexp))
                    add_term(acc, (mexp, others), sign * coef * lc)
    return tuple(acc.items())


def poincare_h(i: int, a: PolyForm) -> PolyForm:
    """Dilation homotopy towards vertex i: d h + h d = 1 - eval at e_i."""
    if not 0 <= i <= a.n:
        raise FormError(f"vertex {i} out of range on the {a.n}-simplex")
    acc: dict = {}
    for (exp, ds), c in a.terms.items():
        for m, v in _h_monomial(a.n, i, exp, ds):
            add_term(acc, m, c * v)
    return PolyForm._raw(a.n, acc)


@dataclass(frozen=True)
class AffineSimplexMap:
    """Affine map between simplices, given by the images of source vertices.

    ``columns[k]`` is the barycentric coordinate vector (length target+1) of
    the image of source vertex k.  Target coordinate t_j pulls back to
    sum_k columns[k][j] * t_k.
    """

    source: int
    target: int
    columns: tuple

    def __post_init__(self):
        if len(self.columns) != self.source + 1:
            raise FormError("need one image point per source vertex")
        cols = []
        for col in self.columns:
            col = tuple(to_fraction(c) for c in col)
            if len(col) != self.target + 1:
                raise FormError("image point has wrong number of barycentric coordinates")
            if sum(col) != 1:
                raise FormError(f"barycentric coordinates {col} do not sum to 1")
            cols.append(col)
        object.__setattr__(self, "columns", tuple(cols))

    @classmethod
    def from_vertices(cls, target: int, images: Sequence[int]) -> "AffineSimplexMap":
        cols = []
        for v in images:
            if not 0 <= v <= target:
                raise FormError(f"vertex {v} not in the {target}-simplex")
            cols.append(tuple(1 if j == v else 0 for j in range(target + 1)))
        return cls(len(images) - 1, target, tuple(cols))

    @classmethod
    def face(cls, n: int, j: int) -> "AffineSimplexMap":
        """Coface inclusion of the (n-1)-simplex opposite vertex j into the n-simplex."""
        if not 0 <= j <= n or n < 1:
            raise FormError(f"no face {j} of the {n}-simplex")
        return cls.from_vertices(n, [k if k < j else k + 1 for k in range(n)])

    @classmethod
    def degeneracy(cls, n: int, j: int) -> "AffineSimplexMap":
        """Codegeneracy from the (n+1)-simplex to the n-simplex hitting j twice."""
        if not 0 <= j <= n:
            raise FormError(f"no degeneracy {j} onto the {n}-simplex")
        return cls.from_vertices(n, [k if k <= j else k - 1 for k in range(n + 2)])

    @classmethod
    def vertex(cls, n: int, i: int) -> "AffineSimplexMap":
        return cls.from_vertices(n, [i])

    @classmethod
    def collapse(cls, n: int, i: int, J: Iterable[int]) -> "AffineSimplexMap":
        """Self-map of the n-simplex sending the vertices in J to vertex i."""
        J = set(J)
        return cls.from_vertices(n, [i if k in J else k for k in range(n + 1)])

    def compose(self, first: "AffineSimplexMap") -> "AffineSimplexMap":
        """self o first."""
        if first.target != self.source:
            raise FormError("maps are not composable")
        cols = []
        for col in first.columns:
            cols.append(
                tuple(
                    sum(col[k] * self.columns[k][j] for k in range(self.source + 1))
                    for j in range(self.target + 1)
                )
            )
        return AffineSimplexMap(first.source, self.target, tuple(cols))

    def coordinate_images(self) -> list[PolyForm]:
        """Pullbacks of t_0..t_target as forms on the source."""
        m = self.source
        out = []
        for j in range(self.target + 1):
            f = PolyForm.zero(m)
            for k in range(m + 1):
                c = self.columns[k][j]
                if c:
                    f = f + PolyForm.t(m, k).scale(c)
            out.append(f)
        return out


class _Puller:
    def __init__(self, m: AffineSimplexMap):
        self.map = m
        imgs = m.coordinate_images()
        self.t = imgs
        self.dt = [d(f) for f in imgs]
        self.powers: dict = {}
        self.cache: dict = {}

    def power(self, j, e):
        key = (j, e)
        if key not in self.powers:
            if e == 0:
                self.powers[key] = PolyForm.const(self.map.source, 1)
            else:
                self.powers[key] = wedge(self.power(j, e - 1), self.t[j])
        return self.powers[key]

    def monomial(self, mono: Monomial) -> PolyForm:
        if mono not in self.cache:
            exp, ds = mono
            f = PolyForm.const(self.map.source, 1)
            for j, e in enumerate(exp):
                if e:
                    f = wedge(f, self.power(j + 1, e))
            for j in ds:
                f = wedge(f, self.dt[j])
            self.cache[mono] = f
        return self.cache[mono]


@lru_cache(maxsize=256)
def _puller(m: AffineSimplexMap) -> _Puller:
    return _Puller(m)


def pullback(m: AffineSimplexMap, a: PolyForm) -> PolyForm:
    if a.n != m.target:
        raise FormError(f"form lives on the {a.n}-simplex, map targets the {m.target}-simplex")
    p = _puller(m)
    acc: dict = {}
    for mono, c in a.terms.items():
        add_into(acc, p.monomial(mono).terms, c)
    return PolyForm._raw(m.source, acc)


def restrict_to_face(a: PolyForm, j: int) -> PolyForm:
    return pullback(AffineSimplexMap.face(a.n, j), a)


@dataclass
class FormFamily:
    """Compatible forms on the codimension-one faces of a boundary or horn.

    ``faces[j]`` lives on the face opposite vertex j, in that face's own
    coordinates.  For a horn the face ``missing`` is absent.
    """

    n: int
    faces: dict
    shape: str = "boundary"
    missing: int | None = None

    def __post_init__(self):
        if self.shape not in ("boundary", "horn"):
            raise FormError(f"unknown shape {self.shape!r}")
        if self.n < 1:
            raise FormError("families need n >= 1")
        expected = set(range(self.n + 1))
        if self.shape == "horn":
            if self.missing is None or not 0 <= self.missing <= self.n:
                raise FormError("a horn needs a missing face index in 0..n")
            expected.discard(self.missing)
        if set(self.faces) != expected:
            raise FormError(f"faces {sorted(self.faces)} do not match the shape, want {sorted(expected)}")
        for j, f in self.faces.items():
            if f.n != self.n - 1:
                raise FormError(f"face {j} is not a form on the {self.n - 1}-simplex")

    @classmethod
    def restrict(cls, a: PolyForm, shape: str = "boundary", missing: int | None = None) -> "FormFamily":
        faces = {j: restrict_to_face(a, j) for j in range(a.n + 1) if j != missing}
        return cls(a.n, faces, shape, missing)

    def incompatibilities(self) -> list[tuple[int, int]]:
        bad = []
        for j, k in itertools.combinations(sorted(self.faces), 2):
            if self.n == 1:
                continue
            lhs = restrict_to_face(self.faces[j], k - 1)
            rhs = restrict_to_face(self.faces[k], j)
            if lhs != rhs:
                bad.append((j, k))
        return bad

    def check(self):
        bad = self.incompatibilities()
        if bad:
            raise FormError(f"family disagrees on the shared subfaces of faces {bad}")

    def boundary(self) -> "FormFamily":
        """Complete a horn to a boundary family by filling the missing face."""
        if self.shape == "boundary":
            return self
        i = self.missing
        n = self.n
        if n == 1:
            filled = PolyForm.zero(0)
        else:
            sub = {}
            for kk in range(n):
                v = kk if kk < i else kk + 1
                idx = i if i < v else i - 1
                sub[kk] = restrict_to_face(self.faces[v], idx)
            filled = boundary_section(FormFamily(n - 1, sub))
        faces = dict(self.faces)
        faces[i] = filled
        return FormFamily(n, faces)


def boundary_section(fam: FormFamily) -> PolyForm:
    """Extend a compatible boundary family over the whole simplex.

    sum_i t_i sum_{J nonempty, i not in J} (-1)^{|J|-1} collapse_{i,J}^* omega,
    where the collapse lands in the face opposite any vertex of J.
    """
    n = fam.n
    out = PolyForm.zero(n)
    for i in range(n + 1):
        inner = PolyForm.zero(n)
        others = [k for k in range(n + 1) if k != i]
        for size in range(1, len(others) + 1):
            for J in itertools.combinations(others, size):
                j = J[0]
                images = []
                for k in range(n + 1):
                    v = i if k in J else k
                    images.append(v if v < j else v - 1)
                m = AffineSimplexMap.from_vertices(n - 1, images)
                term = pullback(m, fam.faces[j])
                inner = inner + (term if size % 2 else -term)
        out = out + wedge(PolyForm.t(n, i), inner)
    return out


def extend_section(fam: FormFamily) -> PolyForm:
    """A form on the simplex restricting to ``fam`` on every face of its shape."""
    fam.check()
    return boundary_section(fam.boundary())
