"""Finitely presented curved L-infinity algebras and their morphisms.

Conventions: brackets have degree +1 and are graded symmetric in the
degree of the algebra itself.  Every basis vector has a filtration weight
w >= 1, a k-bracket lands in weight at least the sum of its inputs, and
everything of weight above ``cutoff`` is zero.  Multilinear data are
stored on canonical words, so graded symmetry is built in once the input
has been normalised.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from . import words as W
from .signs import canonical_word, koszul_sign
from .vectors import Vector, add_into, add_term, fraction_str, scale, to_fraction


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class BasisVector:
    name: str
    deg: int
    weight: int


@dataclass(frozen=True)
class Violation:
    kind: str
    arity: int
    word: tuple
    detail: str = ""

    def __str__(self):
        return f"{self.kind} failure at arity {self.arity} on {list(self.word)}: {self.detail}"


def _vec_str(vec: Mapping) -> str:
    return ", ".join(f"{k}: {fraction_str(c)}" for k, c in sorted(vec.items(), key=repr)) or "0"


class CurvedLinfPresentation:
    """Basis, weights, structure constants and a nilpotency cutoff.

    ``brackets`` maps a sequence of basis names (any order) to an output
    vector.  Input orderings are normalised with the Koszul sign; entries
    that disagree after normalisation, or that put a nonzero value on a
    repeated odd letter, are kept as symmetry violations for
    :func:`validate_algebra`.
    """

    def __init__(
        self,
        basis: Sequence,
        brackets: Mapping[Sequence, Mapping] | Iterable = (),
        cutoff: int = 4,
        arity_cap: int | None = None,
    ):
        self.basis: list[BasisVector] = [
            b if isinstance(b, BasisVector) else BasisVector(*b) for b in basis
        ]
        self._by_name = {b.name: b for b in self.basis}
        if len(self._by_name) != len(self.basis):
            raise AlgebraError("duplicate basis names")
        for b in self.basis:
            if b.weight < 1:
                raise AlgebraError(f"basis vector {b.name} needs weight >= 1")
        if cutoff < 1:
            raise AlgebraError("cutoff must be positive")
        self.cutoff = int(cutoff)
        self.arity_cap = arity_cap if arity_cap is None else int(arity_cap)
        self._brackets: dict[tuple, Vector] = {}
        self._raw_issues: list[Violation] = []
        items = brackets.items() if isinstance(brackets, Mapping) else brackets
        seen: dict[tuple, Vector] = {}
        for word, out in items:
            word = tuple(word)
            for k in list(word) + list(out):
                if k not in self._by_name:
                    raise AlgebraError(f"unknown basis vector {k!r}")
            vec = {k: to_fraction(c) for k, c in out.items() if to_fraction(c)}
            sign, cw = canonical_word(word, self.deg)
            if sign == 0:
                if vec:
                    self._raw_issues.append(
                        Violation("symmetry", len(word), word, "nonzero bracket on a repeated odd vector")
                    )
                continue
            normal = scale(vec, sign)
            if cw in seen and seen[cw] != normal:
                self._raw_issues.append(
                    Violation("symmetry", len(word), word, "orderings of the same inputs disagree")
                )
                continue
            seen[cw] = normal
        for cw, vec in seen.items():
            vec = {k: c for k, c in vec.items() if self.weight(k) <= self.cutoff}
            if vec and (self.arity_cap is None or len(cw) <= self.arity_cap):
                self._brackets[cw] = vec
            elif vec:
                raise AlgebraError(f"bracket of arity {len(cw)} exceeds the arity cap {self.arity_cap}")

    # grading interface
    def deg(self, key) -> int:
        return self._by_name[key].deg

    def weight(self, key) -> int:
        return self._by_name[key].weight

    def keys(self) -> list[str]:
        return [b.name for b in self.basis]

    def __contains__(self, key) -> bool:
        return key in self._by_name

    @property
    def max_arity(self) -> int:
        return max((len(w) for w in self._brackets), default=0)

    def bracket_word(self, word: tuple) -> Vector:
        """Bracket on a canonical word."""
        return self._brackets.get(tuple(word), {})

    def structure_constants(self) -> dict[tuple, Vector]:
        return dict(self._brackets)

    def bracket(self, *vectors: Mapping) -> Vector:
        """Multilinear bracket of vectors (each a dict name -> coefficient)."""
        return bracket_vectors(self, vectors)

    def curvature(self) -> Vector:
        return dict(self.bracket_word(()))

    def unary(self, vec: Mapping) -> Vector:
        return self.bracket(vec)

    def graded_unary(self, key) -> Vector:
        """Weight-preserving part of the unary bracket on one basis vector."""
        w = self.weight(key)
        return {k: c for k, c in self.bracket_word((key,)).items() if self.weight(k) == w}

    def element(self, coeffs: Mapping) -> Vector:
        vec: Vector = {}
        for k, c in coeffs.items():
            if k not in self._by_name:
                raise AlgebraError(f"unknown basis vector {k!r}")
            add_term(vec, k, to_fraction(c))
        return vec

    def __repr__(self):
        return f"CurvedLinfPresentation(dim={len(self.basis)}, cutoff={self.cutoff})"

    def to_json(self) -> dict:
        return {
            "basis": [{"name": b.name, "deg": b.deg, "weight": b.weight} for b in self.basis],
            "brackets": [
                {
                    "arity": len(w),
                    "in": list(w),
                    "out": [{"name": k, "coef": fraction_str(c)} for k, c in sorted(v.items())],
                }
                for w, v in sorted(self._brackets.items(), key=lambda t: (len(t[0]), t[0]))
            ],
            "cutoff": self.cutoff,
            "arity_cap": self.arity_cap if self.arity_cap is not None else max(self.max_arity, 0),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CurvedLinfPresentation":
        basis = [(b["name"], int(b["deg"]), int(b.get("weight", 1))) for b in data["basis"]]
        entries = []
        for br in data.get("brackets", []):
            word = tuple(br["in"])
            if "arity" in br and int(br["arity"]) != len(word):
                raise AlgebraError(f"bracket on {list(word)} declares arity {br['arity']}")
            entries.append((word, {o["name"]: o["coef"] for o in br["out"]}))
        return cls(basis, entries, int(data.get("cutoff", 4)), data.get("arity_cap"))

    # elements
    def degree_of(self, x: Mapping) -> int | None:
        degs = {self.deg(k) for k in x}
        return degs.pop() if len(degs) == 1 else None

    def weight_of(self, x: Mapping) -> int:
        return min((self.weight(k) for k in x), default=self.cutoff + 1)


def bracket_vectors(st, vectors: Sequence[Mapping]) -> Vector:
    """Extend ``st.bracket_word`` multilinearly, with Koszul signs from sorting."""
    out: Vector = {}
    supports = [list(v.items()) for v in vectors]
    for choice in itertools.product(*supports):
        coef = Fraction(1)
        keys = []
        for k, c in choice:
            coef *= c
            keys.append(k)
        sign, cw = canonical_word(keys, st.deg)
        if sign:
            add_into(out, st.bracket_word(cw), sign * coef)
    return out


def curvature_residual(L, x: Mapping) -> Vector:
    """sum_n (1/n!) {x,...,x}, exact because x has positive weight."""
    if any(L.deg(k) != 0 for k in x):
        raise AlgebraError("Maurer-Cartan elements live in degree 0")
    return W.linear_part(delta_words(L, W.exp_vector(L, x)))


def delta_word(L, word: tuple) -> W.WordSum:
    """The Chevalley-Eilenberg codifferential on one word."""
    return W.coderivation(L, L.bracket_word, word)


def delta_words(L, ws: Mapping) -> W.WordSum:
    out: W.WordSum = {}
    for w, c in ws.items():
        add_into(out, delta_word(L, w), c)
    return out


def bracket_of_words(L, ws: Mapping) -> Vector:
    """Length-one part of the codifferential: sum of brackets of every word."""
    out: Vector = {}
    for w, c in ws.items():
        add_into(out, L.bracket_word(w), c)
    return out


def all_words(L, max_len: int | None = None) -> list[tuple]:
    return W.words_up_to_weight(L, L.keys(), L.cutoff, max_len)


def validate_algebra(L) -> list[Violation]:
    """Every violated instance of symmetry, degree, weight or Jacobi, up to the cutoff."""
    report = list(getattr(L, "_raw_issues", []))
    consts = L.structure_constants()
    for word, vec in consts.items():
        d_in = sum(L.deg(k) for k in word) + 1
        w_in = sum(L.weight(k) for k in word)
        for k, c in vec.items():
            if L.deg(k) != d_in:
                report.append(Violation("degree", len(word), word, f"output {k} has degree {L.deg(k)}, expected {d_in}"))
            if L.weight(k) < w_in:
                report.append(Violation("weight", len(word), word, f"output {k} has weight {L.weight(k)} < {w_in}"))
    for word in all_words(L):
        val = bracket_of_words(L, delta_word(L, word))
        if val:
            report.append(Violation("jacobi", len(word), word, _vec_str(val)))
    return report


def random_element(L, rng: random.Random, deg: int = 0, span: int = 3, density: float = 0.8) -> Vector:
    out: Vector = {}
    for b in L.basis:
        if b.deg == deg and rng.random() < density:
            c = Fraction(rng.randint(-span, span), rng.choice([1, 1, 2, 3]))
            if c:
                out[b.name] = c
    return out


# ----------------------------------------------------------------- morphisms


def set_partitions(n: int) -> Iterator[list[tuple[int, ...]]]:
    """Unordered partitions of range(n) into blocks, blocks ordered by least element."""
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1):
        for j in range(len(part)):
            yield part[:j] + [part[j] + (n - 1,)] + part[j + 1:]
        yield part + [(n - 1,)]


class LinfMorphism:
    """Components f_(k) given on canonical words of the source.

    Components are either a finite table (``components``) or a callable
    ``component_fn(word) -> vector`` (used for composites and transferred
    maps); the table wins when both are given.
    """

    def __init__(
        self,
        source,
        target,
        components: Mapping[Sequence, Mapping] | Iterable = (),
        component_fn: Callable[[tuple], Mapping] | None = None,
        arity_cap: int | None = None,
        name: str = "f",
    ):
        self.source = source
        self.target = target
        self.arity_cap = arity_cap
        self.name = name
        self._table: dict[tuple, Vector] = {}
        self._fn = component_fn
        self._cache: dict[tuple, Vector] = {}
        items = components.items() if isinstance(components, Mapping) else components
        for word, out in items:
            word = tuple(word)
            sign, cw = canonical_word(word, source.deg)
            vec = {k: to_fraction(c) for k, c in out.items() if to_fraction(c)}
            for k in vec:
                if k not in target:
                    raise AlgebraError(f"unknown target basis vector {k!r}")
            if sign == 0:
                if vec:
                    raise AlgebraError(f"nonzero component on repeated odd input {list(word)}")
                continue
            vec = {k: c for k, c in scale(vec, sign).items() if target.weight(k) <= target.cutoff}
            if cw in self._table and self._table[cw] != vec:
                raise AlgebraError(f"orderings of {list(word)} disagree")
            if vec:
                self._table[cw] = vec
        self._fn_given = component_fn is not None

    @property
    def strict(self) -> bool:
        return all(len(w) == 1 for w in self._table) and not self._fn_given

    def component(self, word: tuple) -> Vector:
        word = tuple(word)
        if word in self._table or not self._fn_given:
            return self._table.get(word, {})
        try:
            return self._cache[word]
        except KeyError:
            val = {k: c for k, c in self._fn(word).items() if self.target.weight(k) <= self.target.cutoff}
            self._cache[word] = val
            return val

    def f0(self) -> Vector:
        return self.component(())

    def linear(self, vec: Mapping) -> Vector:
        out: Vector = {}
        for k, c in vec.items():
            add_into(out, self.component((k,)), c)
        return out

    def coalgebra_map(self, word: tuple) -> W.WordSum:
        """C(f) on one word: exp(f_(0)) times the sum over block partitions."""
        g_out = self.target
        degs = [self.source.deg(k) for k in word]
        acc: W.WordSum = {}
        for part in set_partitions(len(word)):
            order = [j for block in part for j in block]
            sign = koszul_sign(degs, order)
            vecs = [self.component(tuple(word[j] for j in block)) for block in part]
            if any(not v for v in vecs):
                continue
            add_into(acc, W.product_of_vectors(g_out, vecs), sign)
        f0 = self.f0()
        if f0 and acc:
            acc = W.multiply(g_out, W.exp_vector(g_out, f0), acc)
        return acc

    def coalgebra_map_sum(self, ws: Mapping) -> W.WordSum:
        out: W.WordSum = {}
        for w, c in ws.items():
            add_into(out, self.coalgebra_map(w), c)
        return out

    def __call__(self, x: Mapping) -> Vector:
        return apply_morphism(self, x)

    def table(self, max_len: int | None = None) -> dict[tuple, Vector]:
        """All nonzero components on source words of weight <= cutoff."""
        out = {}
        for w in all_words(self.source, max_len):
            v = self.component(w)
            if v:
                out[w] = v
        return out

    def to_json(self) -> dict:
        comps: dict[str, list] = {}
        cap = self.arity_cap
        for w, v in sorted(self.table().items(), key=lambda t: (len(t[0]), t[0])):
            if cap is not None and len(w) > cap:
                raise W.CutoffError(f"component of arity {len(w)} exceeds the arity cap {cap}")
            comps.setdefault(str(len(w)), []).append(
                {"in": list(w), "out": [{"name": k, "coef": fraction_str(c)} for k, c in sorted(v.items())]}
            )
        return {"components": comps, "arity_cap": cap}

    @classmethod
    def from_json(cls, source, target, data: Mapping) -> "LinfMorphism":
        entries = []
        for arity, lst in data.get("components", {}).items():
            for e in lst:
                if len(e["in"]) != int(arity):
                    raise AlgebraError(f"component {e['in']} filed under arity {arity}")
                entries.append((tuple(e["in"]), {o["name"]: o["coef"] for o in e["out"]}))
        return cls(source, target, entries, arity_cap=data.get("arity_cap"))


def identity_morphism(L) -> LinfMorphism:
    return LinfMorphism(L, L, {(k,): {k: 1} for k in L.keys()}, name="id")


def apply_morphism(f: LinfMorphism, x: Mapping) -> Vector:
    """f(x) = sum_k (1/k!) f_(k)(x,...,x)."""
    out: Vector = {}
    for w, c in W.exp_vector(f.source, x).items():
        add_into(out, f.component(w), c)
    return out


def compose_morphisms(g: LinfMorphism, f: LinfMorphism) -> LinfMorphism:
    """g . f with components [C(g) C(f) w]_1, computed lazily per word."""
    if f.target is not g.source:
        raise AlgebraError("target of f is not the source of g")

    def comp(word):
        out: Vector = {}
        for v, c in f.coalgebra_map(word).items():
            add_into(out, g.component(v), c)
        return out

    caps = [a for a in (f.arity_cap, g.arity_cap) if a is not None]
    return LinfMorphism(
        f.source, g.target, component_fn=comp, arity_cap=max(caps) if caps else None, name=f"{g.name}.{f.name}"
    )


def check_morphism(f: LinfMorphism, max_len: int | None = None) -> list[Violation]:
    """Compare [C(f) delta w]_1 with [delta C(f) w]_1 on all words of weight <= cutoff."""
    report = []
    L, M = f.source, f.target
    for w in all_words(L, max_len):
        left: Vector = {}
        for v, c in delta_word(L, w).items():
            add_into(left, f.component(v), c)
        right = bracket_of_words(M, f.coalgebra_map(w))
        diff = add_into(dict(left), right, -1)
        if diff:
            report.append(Violation("morphism", len(w), w, _vec_str(diff)))
    return report


def morphism_difference(f: LinfMorphism, g: LinfMorphism, max_len: int | None = None) -> list[Violation]:
    """Words on which two morphisms with the same source differ."""
    out = []
    for w in all_words(f.source, max_len):
        diff = add_into(dict(f.component(w)), g.component(w), -1)
        if diff:
            out.append(Violation("components", len(w), w, _vec_str(diff)))
    return out


def strict_morphism(source, target, matrix: Mapping[str, Mapping]) -> LinfMorphism:
    return LinfMorphism(source, target, {(k,): v for k, v in matrix.items()}, name="strict")


def direct_sum(L1, L2) -> CurvedLinfPresentation:
    """Product algebra on disjoint bases; mixed brackets vanish."""
    clash = set(L1.keys()) & set(L2.keys())
    if clash:
        raise AlgebraError(f"basis names {sorted(clash)} occur in both summands")
    brackets = dict(L1.structure_constants())
    for w, v in L2.structure_constants().items():
        if w in brackets:
            brackets[w] = add_into(dict(brackets[w]), v)
        else:
            brackets[w] = v
    return CurvedLinfPresentation(L1.basis + L2.basis, brackets, max(L1.cutoff, L2.cutoff))


def projection(S, L) -> LinfMorphism:
    """The strict projection from a direct sum S onto its summand L."""
    return strict_morphism(S, L, {k: ({k: 1} if k in L else {}) for k in S.keys()})


# ----------------------------------------------- random valid algebras by transport


def transport_algebra(L, phi: LinfMorphism, name_map=None) -> CurvedLinfPresentation:
    """The structure phi_* delta_L = C(phi) delta_L C(phi)^{-1} on the same basis.

    ``phi`` must be an endomorphism-shaped morphism L -> L (used only as a
    map of coalgebras; it need not respect brackets) whose linear part is
    the identity plus weight-raising terms.
    """
    inv = invert_morphism(phi)
    brackets = {}
    for w in all_words(L):
        val: Vector = {}
        for v, c in inv.coalgebra_map(w).items():
            for u, c2 in delta_word(L, v).items():
                add_into(val, phi.component(u), c * c2)
        if val:
            brackets[w] = val
    return CurvedLinfPresentation(L.basis, brackets, L.cutoff, L.arity_cap)


def invert_morphism(phi: LinfMorphism) -> LinfMorphism:
    """Components of the coalgebra inverse, for phi_(1) unipotent on the weight filtration."""
    L = phi.source
    table: dict[tuple, Vector] = {}
    words = sorted(all_words(L), key=len)
    psi = LinfMorphism(L, L, component_fn=lambda w: table.get(w, {}), name="inv")
    # fixed point psi <- psi - (phi . psi - id); differences gain weight each round
    for _ in range(L.cutoff + 1):
        psi._cache.clear()
        comp = compose_morphisms(phi, psi)
        new = {}
        for w in words:
            cur = table.get(w, {})
            target = {w[0]: Fraction(1)} if len(w) == 1 else {}
            val = add_into(dict(cur), comp.component(w), -1)
            add_into(val, target)
            val = {k: c for k, c in val.items() if L.weight(k) <= L.cutoff}
            if val:
                new[w] = val
        if new == table:
            break
        table.clear()
        table.update(new)
    psi._cache.clear()
    check = compose_morphisms(phi, psi)
    for w in words:
        want = {w[0]: Fraction(1)} if len(w) == 1 else {}
        if check.component(w) != want:
            raise AlgebraError("inverse iteration did not converge; linear part is not unipotent")
    return psi


def random_automorphism(L, rng: random.Random, curved: bool = True, max_arity: int = 3) -> LinfMorphism:
    """Identity plus random degree-zero, weight-raising components."""
    comps: dict[tuple, Vector] = {}
    by_deg: dict[int, list[BasisVector]] = {}
    for b in L.basis:
        by_deg.setdefault(b.deg, []).append(b)
    for w in all_words(L, max_arity):
        if len(w) == 0 and not curved:
            continue
        d = sum(L.deg(k) for k in w)
        wt = sum(L.weight(k) for k in w)
        vec: Vector = {}
        if len(w) == 1:
            vec[w[0]] = Fraction(1)
        for b in by_deg.get(d, []):
            need = wt + 1 if len(w) == 1 else max(wt, 1)
            if b.weight >= need and rng.random() < 0.5:
                c = Fraction(rng.randint(-2, 2), rng.choice([1, 2]))
                add_term(vec, b.name, c)
        if vec:
            comps[w] = vec
    return LinfMorphism(L, L, comps, name="phi")


# ------------------------------------------------------------ fibered products


def _weight_adapted_kernel(src, f_lin: Mapping[str, Mapping]):
    """Basis of ker(df) adapted to the weight filtration, via sympy."""
    import sympy

    keys = src.keys()
    tgt_keys = sorted({k for v in f_lin.values() for k in v})
    out = []
    # ker restricted to each F^w, ordered from high weight down, so that
    # vectors of weight w start at a basis vector of weight w
    chosen = []
    for w, deg in sorted({(src.weight(k), src.deg(k)) for k in keys}, reverse=True):
        cols = [k for k in keys if src.weight(k) >= w and src.deg(k) == deg]
        if not tgt_keys:
            mat = sympy.zeros(0, len(cols))
        else:
            mat = sympy.Matrix(
                [[sympy.Rational(f_lin.get(k, {}).get(t, 0)) for k in cols] for t in tgt_keys]
            )
        null = mat.nullspace() if tgt_keys else [sympy.eye(len(cols))[:, j] for j in range(len(cols))]
        for vec in null:
            cand = {cols[j]: Fraction(int(vec[j].p), int(vec[j].q)) for j in range(len(cols)) if vec[j] != 0}
            if _independent(chosen + [cand], keys):
                chosen.append(cand)
                out.append((w, cand))
    return out


def _independent(vectors: list[Mapping], keys) -> bool:
    import sympy

    if not vectors:
        return True
    mat = sympy.Matrix([[sympy.Rational(v.get(k, 0)) for k in keys] for v in vectors])
    return mat.rank() == len(vectors)


def linear_section(f: LinfMorphism) -> dict[str, Vector]:
    """A filtration-preserving linear map s with df . s = 1, or AlgebraError if df is not onto."""
    import sympy

    L, M = f.source, f.target
    df = {k: f.component((k,)) for k in L.keys()}
    out = {}
    for m in M.keys():
        cols = [k for k in L.keys() if L.deg(k) == M.deg(m) and L.weight(k) >= M.weight(m)]
        rows = sorted({t for k in cols for t in df[k]} | {m})
        mat = sympy.Matrix([[sympy.Rational(df[k].get(t, 0)) for k in cols] for t in rows]) if cols else None
        rhs = sympy.Matrix([1 if t == m else 0 for t in rows])
        try:
            if mat is None:
                raise ValueError
            sol, params = mat.gauss_jordan_solve(rhs)
        except ValueError:
            raise AlgebraError(f"df is not onto at {m!r}; f is not a fibration") from None
        sol = sol.subs({p: 0 for p in params})
        out[m] = {cols[j]: Fraction(int(sol[j].p), int(sol[j].q)) for j in range(len(cols)) if sol[j] != 0}
    return out


@dataclass
class FiberedProduct:
    P: CurvedLinfPresentation
    F: LinfMorphism
    G: LinfMorphism
    kernel_basis: dict


def fibered_product(
    f: LinfMorphism, section: Mapping[str, Mapping], g: LinfMorphism, prefix: tuple[str, str] = ("K", "")
) -> FiberedProduct:
    """Pullback of a fibration f: L -> M along g: N -> M with a strict projection to N.

    ``section`` is a linear map s: M -> L (name -> vector) with df . s = 1.
    The pullback lives on ker(df) x N; the L-valued morphism G is the
    unique one with p G_(1)(zeta) = p zeta_K and p G_(n) = 0 otherwise,
    where p = 1 - s df.
    """
    L, M, N = f.source, f.target, g.source
    if g.target is not M:
        raise AlgebraError("f and g must share their target")
    s = {k: {kk: to_fraction(c) for kk, c in v.items()} for k, v in section.items()}
    for k, v in s.items():
        if k not in M:
            raise AlgebraError(f"section is defined on unknown vector {k!r}")
        for kk in v:
            if kk not in L:
                raise AlgebraError(f"section lands on unknown vector {kk!r}")

    def s_map(vec):
        out: Vector = {}
        for k, c in vec.items():
            add_into(out, s.get(k, {}), c)
        return out

    df = {k: f.component((k,)) for k in L.keys()}
    for m in M.keys():
        back: Vector = {}
        for k, c in s.get(m, {}).items():
            add_into(back, df[k], c)
        if back != {m: Fraction(1)}:
            raise AlgebraError(f"df . s is not the identity on {m!r}")

    def p_map(vec):
        out = dict(vec)
        for k, c in vec.items():
            add_into(out, s_map(df[k]), -c)
        return out

    kernel = _weight_adapted_kernel(L, df)
    kprefix, nprefix = prefix
    kbasis = []
    kvec: dict[str, Vector] = {}
    for j, (w, vec) in enumerate(kernel):
        degs = {L.deg(k) for k in vec}
        if len(degs) != 1:
            raise AlgebraError("kernel of df is not homogeneous; split by degree first")
        name = f"{kprefix}{j}"
        kbasis.append((name, degs.pop(), w))
        kvec[name] = vec
    # express p-images in the kernel basis
    import sympy

    kn = list(kvec)
    lkeys = L.keys()
    if kn:
        Kmat = sympy.Matrix([[sympy.Rational(kvec[n].get(k, 0)) for n in kn] for k in lkeys])
    nbasis = [(nprefix + b.name, b.deg, b.weight) for b in N.basis]
    if set(n for n, _, _ in nbasis) & set(kn):
        raise AlgebraError("name clash between kernel and N basis; change the prefix")
    cutoff = max(L.cutoff, N.cutoff)

    def to_kernel(vec):
        """Coordinates of a vector in ker df."""
        if not vec:
            return {}
        if not kn:
            raise AlgebraError("nonzero vector in an empty kernel")
        rhs = sympy.Matrix([sympy.Rational(vec.get(k, 0)) for k in lkeys])
        sol, params = Kmat.gauss_jordan_solve(rhs)
        if params.shape[0]:
            raise AlgebraError("kernel basis is degenerate")
        return {n: Fraction(int(sol[j].p), int(sol[j].q)) for j, n in enumerate(kn) if sol[j] != 0}

    nmap = {nprefix + b.name: b.name for b in N.basis}
    Pgrading = _Grading({n: (d, w) for n, d, w in kbasis + nbasis}, cutoff)

    # G on P-words, solved by weight recursion: G(w) = p-part + s(g(w_N) - [f.G]_rest)
    Gtable: dict[tuple, Vector] = {}

    def split(word):
        return all(k in kvec for k in word), all(k in nmap for k in word)

    def g_on(word):
        if not all(k in nmap for k in word):
            return {}
        return g.component(tuple(nmap[k] for k in word))

    def fG_rest(word, G):
        """[C(f) C(G) word]_1 with the f_(1) G_(|word|) term removed."""
        total: Vector = {}
        for v, c in G.coalgebra_map(word).items():
            add_into(total, f.component(v), c)
        add_into(total, f.linear(G.component(word)), -1)
        return total

    G = LinfMorphism(None, L, component_fn=lambda w: Gtable.get(w, {}), name="G")
    G.source = Pgrading
    pwords = sorted(W.words_up_to_weight(Pgrading, Pgrading.keys(), cutoff), key=len)
    for _ in range(cutoff + 2):
        G._cache.clear()
        new = {}
        for w in pwords:
            base: Vector = {}
            if len(w) == 1 and w[0] in kvec:
                base = dict(kvec[w[0]])
            rest = fG_rest(w, G)
            corr = add_into(dict(g_on(w)), rest, -1)
            val = add_into(base, s_map(corr))
            val = {k: c for k, c in val.items() if L.weight(k) <= L.cutoff}
            if val:
                new[w] = val
        if new == Gtable:
            break
        Gtable.clear()
        Gtable.update(new)
    G._cache.clear()

    # brackets: N-part from N, kernel part from p((delta_L . G)_(n))
    brackets: dict[tuple, Vector] = {}
    for w in pwords:
        out: Vector = {}
        if all(k in nmap for k in w):
            for k, c in N.bracket_word(tuple(nmap[k] for k in w)).items():
                add_term(out, nprefix + k, c)
        lval = bracket_of_words(L, G.coalgebra_map(w))
        add_into(out, to_kernel(p_map(lval)))
        out = {k: c for k, c in out.items() if Pgrading.weight(k) <= cutoff}
        if out:
            brackets[w] = out
    P = CurvedLinfPresentation(kbasis + nbasis, brackets, cutoff, max((len(w) for w in brackets), default=0) or None)
    G.source = P
    F = LinfMorphism(P, N, {(nprefix + b.name,): {b.name: 1} for b in N.basis}, name="F")
    return FiberedProduct(P, F, G, kvec)


class _Grading:
    def __init__(self, table: Mapping[str, tuple[int, int]], cutoff: int):
        self._t = dict(table)
        self.cutoff = cutoff

    def deg(self, k):
        return self._t[k][0]

    def weight(self, k):
        return self._t[k][1]

    def keys(self):
        return list(self._t)

    def __contains__(self, k):
        return k in self._t


def load_algebra(text: str) -> CurvedLinfPresentation:
    return CurvedLinfPresentation.from_json(json.loads(text))
