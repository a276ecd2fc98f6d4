"""Contractions, the perturbation lemma, the tensor trick and transfer.

A contraction is (V, D, W, d, p, i, h) with ip + Dh + hD = 1_V, pi = 1_W
and h^2 = ph = hi = 0.  All maps are :class:`LinearOp` values on basis
keys, so the same code serves finite presentations, L-valued forms and
the symmetric coalgebras (whose keys are words).

Every geometric series is summed until it vanishes.  Termination comes
from the filtration; a cap turns a non-terminating series into a
:class:`~mcholonomy.words.CutoffError` instead of a silent truncation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import words as W
from .linf import (
    AlgebraError,
    CurvedLinfPresentation,
    LinfMorphism,
    apply_morphism,
    bracket_vectors,
    curvature_residual,
)
from .vectors import LinearOp, Vector, add_into, fraction_str, to_fraction


class ContractionError(ValueError):
    pass


class Grading:
    """A table of (degree, weight) per key with a weight cutoff."""

    def __init__(self, table: Mapping, cutoff: int):
        self.table = {k: (int(d), int(w)) for k, (d, w) in table.items()}
        self.cutoff = cutoff

    def deg(self, k) -> int:
        return self.table[k][0]

    def weight(self, k) -> int:
        return self.table[k][1]

    def keys(self) -> list:
        return list(self.table)

    def __contains__(self, k):
        return k in self.table


class WordGrading:
    """Grading of the symmetric coalgebra: keys are words over ``base``."""

    def __init__(self, base):
        self.base = base
        self.cutoff = base.cutoff

    def deg(self, word) -> int:
        return W.word_deg(self.base, word)

    def weight(self, word) -> int:
        return W.word_weight(self.base, word)


def _vec_weight(g, vec) -> int:
    return min((g.weight(k) for k in vec), default=10**9)


class Contraction:
    """The data (V, D, W, d, p, i, h); ``big``/``small`` are gradings."""

    def __init__(self, big, small, D: LinearOp, d: LinearOp, p: LinearOp, i: LinearOp, h: LinearOp, name="c"):
        self.big = big
        self.small = small
        self.D, self.d, self.p, self.i, self.h = D, d, p, i, h
        self.name = name

    def failures(self, big_keys: Iterable, small_keys: Iterable) -> list[str]:
        """Every violated identity on the given spanning keys, as readable strings."""
        out = []
        small_keys = list(small_keys)
        for k in big_keys:
            one = {k: Fraction(1)}
            lhs = self.i(self.p.key(k))
            add_into(lhs, self.D(self.h.key(k)))
            add_into(lhs, self.h(self.D.key(k)))
            if lhs != one:
                out.append(f"ip + Dh + hD != 1 on {k!r}")
            hk = self.h.key(k)
            if self.h(hk):
                out.append(f"h^2 != 0 on {k!r}")
            if self.p(hk):
                out.append(f"ph != 0 on {k!r}")
            if self.p(self.D.key(k)) != self.d(self.p.key(k)):
                out.append(f"pD != dp on {k!r}")
        for k in small_keys:
            one = {k: Fraction(1)}
            ik = self.i.key(k)
            if self.p(ik) != one:
                out.append(f"pi != 1 on {k!r}")
            if self.h(ik):
                out.append(f"hi != 0 on {k!r}")
            if self.D(ik) != self.i(self.d.key(k)):
                out.append(f"Di != id on {k!r}")
        return out

    def verify(self, big_keys: Iterable, small_keys: Iterable) -> "Contraction":
        bad = self.failures(big_keys, small_keys)
        if bad:
            raise ContractionError("; ".join(bad[:5]) + (f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""))
        return self

    def __repr__(self):
        return f"Contraction({self.name})"


class FiniteContraction(Contraction):
    """A contraction of finite-dimensional graded spaces, with JSON I/O."""

    def __init__(self, big: Grading, small: Grading, D, d, p, i, h, name="finite", verify=True):
        mats = {}
        for label, m in (("D", D), ("d", d), ("p", p), ("i", i), ("h", h)):
            cols = {k: {kk: to_fraction(c) for kk, c in v.items() if to_fraction(c)} for k, v in m.items()}
            mats[label] = {k: v for k, v in cols.items() if v}
        self.matrices = mats
        ops = {k: LinearOp.from_matrix(v, k) for k, v in mats.items()}
        super().__init__(big, small, ops["D"], ops["d"], ops["p"], ops["i"], ops["h"], name)
        if verify:
            self.verify(big.keys(), small.keys())

    @property
    def big_keys(self):
        return self.big.keys()

    @property
    def small_keys(self):
        return self.small.keys()

    def to_json(self) -> dict:
        def enc(m):
            return {
                str(k): {str(kk): fraction_str(c) for kk, c in sorted(v.items())}
                for k, v in sorted(m.items())
                if v
            }

        return {
            "big": [{"name": k, "deg": d, "weight": w} for k, (d, w) in self.big.table.items()],
            "small": [{"name": k, "deg": d, "weight": w} for k, (d, w) in self.small.table.items()],
            **{label: enc(m) for label, m in self.matrices.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping, cutoff: int, verify=True) -> "FiniteContraction":
        big = Grading({b["name"]: (b["deg"], b.get("weight", 1)) for b in data["big"]}, cutoff)
        small = Grading({b["name"]: (b["deg"], b.get("weight", 1)) for b in data.get("small", [])}, cutoff)
        mats = {label: data.get(label, {}) for label in ("D", "d", "p", "i", "h")}
        return cls(big, small, **mats, verify=verify)


def contraction_for_algebra(L, small: Mapping, p, i, h, verify=True) -> FiniteContraction:
    """Contraction of the underlying space of L with D the weight-preserving unary part."""
    big = Grading({b.name: (b.deg, b.weight) for b in L.basis}, L.cutoff)
    smallg = Grading(small, L.cutoff)
    D = {k: L.graded_unary(k) for k in L.keys()}
    c0 = FiniteContraction(big, smallg, D, {}, p, i, h, verify=False)
    dmat = {k: c0.p(c0.D(c0.i.key(k))) for k in smallg.keys()}
    return FiniteContraction(big, smallg, D, dmat, p, i, h, verify=verify)


def normalize_homotopy(c: FiniteContraction) -> FiniteContraction:
    """Enforce the side conditions: h -> (1-ip) h (1-ip), then h -> h D h."""
    keys = c.big.keys()
    one_minus_ip = {k: add_into({k: Fraction(1)}, c.i(c.p.key(k)), -1) for k in keys}
    q = LinearOp.from_matrix(one_minus_ip)
    h1 = {k: q(c.h(q.key(k))) for k in keys}
    H1 = LinearOp.from_matrix(h1)
    h2 = {k: H1(c.D(H1.key(k))) for k in keys}
    return FiniteContraction(c.big, c.small, c.matrices["D"], c.matrices["d"], c.matrices["p"], c.matrices["i"], h2)


# ---------------------------------------------------------------- perturbation


def _neumann(start: Mapping, step: Callable[[Mapping], Mapping], cap: int) -> Vector:
    """sum_{j>=0} (-step)^j applied to start."""
    acc = dict(start)
    term = dict(start)
    for _ in range(cap):
        term = {k: -c for k, c in step(term).items()}
        if not term:
            return acc
        add_into(acc, term)
    if step(term):
        raise W.CutoffError(f"perturbation series did not terminate within {cap} terms")
    return acc


class PerturbedContraction(Contraction):
    """D_mu = D + mu, h_mu = (1 + h mu)^-1 h, d_mu = d + p (1 + mu h)^-1 mu i, ..."""

    def __init__(self, c: Contraction, mu: LinearOp, cap: int):
        self.base = c
        self.mu = mu
        self.cap = cap
        hmu = lambda v: c.h(mu(v))
        muh = lambda v: mu(c.h(v))
        D = c.D + mu
        h = LinearOp(lambda k: _neumann(c.h.key(k), hmu, cap), "h_mu")
        i = LinearOp(lambda k: _neumann(c.i.key(k), hmu, cap), "i_mu")
        p = LinearOp(lambda k: c.p(_neumann({k: Fraction(1)}, muh, cap)), "p_mu")
        d = LinearOp(
            lambda k: add_into(dict(c.d.key(k)), c.p(_neumann(mu(c.i.key(k)), muh, cap))), "d_mu"
        )
        super().__init__(c.big, c.small, D, d, p, i, h, name=f"{c.name}_mu")


def perturb_contraction(c: Contraction, mu: LinearOp | Mapping, cap: int | None = None, check_keys=None) -> PerturbedContraction:
    """Apply the perturbation lemma.  ``mu`` must raise the filtration.

    With ``check_keys`` the weight increase is verified on those keys.
    """
    if not isinstance(mu, LinearOp):
        mu = LinearOp.from_matrix(mu, "mu")
    if check_keys is not None:
        for k in check_keys:
            out = mu.key(k)
            if out and _vec_weight(c.big, out) <= c.big.weight(k):
                raise ContractionError(f"mu does not raise the filtration on {k!r}")
    if cap is None:
        cap = 2 * c.big.cutoff + 2
    return PerturbedContraction(c, mu, cap)


# ---------------------------------------------------------------- tensor trick


class CoalgebraContraction(Contraction):
    """The contraction (p, i, h) lifted to symmetric coalgebras.

    Keys are canonical words.  ``max_len`` bounds word length; meeting a
    longer word of visible weight raises instead of dropping it.
    """

    def __init__(self, c: Contraction, max_len: int | None = None):
        self.base = c
        gV, gW = c.big, c.small
        self.max_len = max_len if max_len is not None else gV.cutoff

        def guard(word):
            if len(word) > self.max_len:
                raise W.CutoffError(f"word of length {len(word)} exceeds the word-length cap {self.max_len}")

        def D(word):
            guard(word)
            return W.coderivation(gV, lambda sub: c.D.key(sub[0]), word, arities=(1,))

        def d(word):
            guard(word)
            return W.coderivation(gW, lambda sub: c.d.key(sub[0]), word, arities=(1,))

        def p(word):
            guard(word)
            return W.letterwise(gW, c.p.key, word)

        def i(word):
            guard(word)
            return W.letterwise(gV, c.i.key, word)

        ip = LinearOp(lambda k: c.i(c.p.key(k)), "ip")

        def h(word):
            guard(word)
            return W.symmetrized_homotopy(gV, c.h.key, ip.key, word)

        super().__init__(
            WordGrading(gV),
            WordGrading(gW),
            LinearOp(D, "D"),
            LinearOp(d, "d"),
            LinearOp(p, "p"),
            LinearOp(i, "i"),
            LinearOp(h, "h"),
            name=f"C({c.name})",
        )


def lift_contraction_to_coalgebra(c: Contraction, max_len: int | None = None) -> CoalgebraContraction:
    return CoalgebraContraction(c, max_len)


def _mu_component(L, D: LinearOp) -> Callable:
    def comp(sub):
        val = L.bracket_word(sub)
        if len(sub) == 1:
            val = add_into(dict(val), D.key(sub[0]), -1)
        return val

    return comp


class Transfer:
    """Homotopy transfer of the curved L-infinity structure of ``L`` along ``c``.

    The transferred algebra is exposed through the grading interface
    (``deg``, ``weight``, ``cutoff``, ``bracket_word``) so it can be fed to
    the generic routines of :mod:`mcholonomy.linf`.
    """

    def __init__(self, L, c: Contraction, max_len: int | None = None, cap: int | None = None):
        self.L = L
        self.c = c
        self.lifted = lift_contraction_to_coalgebra(c, max_len)
        gV = c.big
        comp = _mu_component(L, c.D)
        guard = self.lifted.max_len

        def mu(word):
            if len(word) > guard:
                raise W.CutoffError(f"word of length {len(word)} exceeds the word-length cap {guard}")
            return W.coderivation(gV, comp, word)

        self.mu = LinearOp(mu, "mu")
        self.perturbed = perturb_contraction(self.lifted, self.mu, cap)
        self.cutoff = c.small.cutoff
        self._brackets: dict = {}

    # grading interface of the transferred algebra
    def deg(self, k):
        return self.c.small.deg(k)

    def weight(self, k):
        return self.c.small.weight(k)

    def bracket_word(self, word: tuple) -> Vector:
        try:
            return self._brackets[word]
        except KeyError:
            val = W.linear_part(self.perturbed.d.key(tuple(word)))
            self._brackets[word] = val
            return val

    def bracket(self, *vectors):
        return bracket_vectors(self, vectors)

    def keys(self):
        return self.c.small.keys()

    def __contains__(self, k):
        return k in self.c.small

    @property
    def p_mu(self) -> LinfMorphism:
        return LinfMorphism(self.L, self, component_fn=lambda w: W.linear_part(self.perturbed.p.key(w)), name="p_mu")

    @property
    def i_mu(self) -> LinfMorphism:
        return LinfMorphism(self, self.L, component_fn=lambda w: W.linear_part(self.perturbed.i.key(w)), name="i_mu")

    def pushforward(self, x: Mapping) -> Vector:
        """MC(p_mu) x, the length-one part of p_mu exp(x)."""
        return W.linear_part(self.perturbed.p(W.exp_vector(self.c.big, x)))

    def pullback_mc(self, y: Mapping) -> Vector:
        """MC(i_mu) y, the length-one part of i_mu exp(y)."""
        return W.linear_part(self.perturbed.i(W.exp_vector(self.c.small, y)))

    def presentation(self) -> CurvedLinfPresentation:
        """Materialise the transferred brackets (small space must be finite)."""
        keys = self.c.small.keys()
        basis = [(k, self.deg(k), self.weight(k)) for k in keys]
        brackets = {}
        for w in W.words_up_to_weight(self, keys, self.cutoff):
            v = self.bracket_word(w)
            if v:
                brackets[w] = v
        return CurvedLinfPresentation(basis, brackets, self.cutoff)


def transfer_structure(L, c: Contraction, max_len: int | None = None, cap: int | None = None) -> Transfer:
    """Transferred algebra with the comparison morphisms p_mu and i_mu."""
    for k in getattr(c.big, "keys", lambda: [])():
        if k not in L:
            raise ContractionError(f"contraction key {k!r} is not a basis vector of the algebra")
        excess = add_into(dict(L.bracket_word((k,))), c.D.key(k), -1)
        if excess and _vec_weight(L, excess) <= L.weight(k):
            raise ContractionError(f"unary bracket minus D does not raise the filtration on {k!r}")
    return Transfer(L, c, max_len, cap)


def mc_section(L, c: Contraction, y: Mapping, residual: Callable[[Mapping], Mapping] | None = None) -> Vector:
    """MC(i_mu) y as the fixed point z = i y - h(R(z)), R(z) = MC(z) - Dz.

    Differences between iterates gain weight each round, so the loop
    stops after at most cutoff + 1 rounds.
    """
    res = residual or (lambda z: curvature_residual(L, z))
    iy = c.i(y)
    z = dict(iy)
    for _ in range(c.big.cutoff + 2):
        r = add_into(dict(res(z)), c.D(z), -1)
        new = add_into(dict(iy), c.h(r), -1)
        if new == z:
            return z
        z = new
    raise W.CutoffError("section iteration did not stabilise")


# ---------------------------------------------------------------- Kuranishi


def kuranishi_solve(L, c: Contraction, seed: Mapping | None = None, iterations: int | None = None) -> Vector:
    """Gauge-fixed Maurer-Cartan element of a contractible curved algebra.

    Iterates x -> x - h MC(x) from a seed in ker h (default 0) exactly
    ``cutoff`` times, then checks h x = 0 and MC(x) = 0.
    """
    small = list(getattr(c.small, "keys", lambda: [])())
    if small:
        raise ContractionError("Kuranishi solving needs a contraction onto zero")
    x = {k: to_fraction(v) for k, v in (seed or {}).items() if to_fraction(v)}
    if c.h(x):
        raise ContractionError("the seed must satisfy h(seed) = 0")
    n = L.cutoff if iterations is None else iterations
    for _ in range(n):
        x = add_into(dict(x), c.h(curvature_residual(L, x)), -1)
    if c.h(x):
        raise ContractionError("h(x) != 0 after iteration; is h^2 = 0?")
    if curvature_residual(L, x):
        raise ContractionError("Maurer-Cartan residual nonzero after the iteration; contraction data invalid")
    return x


def pushforward_mc(t: Transfer, x: Mapping, check: bool = True) -> Vector:
    """MC(p_mu) x for a Maurer-Cartan element x of the big algebra."""
    if check and curvature_residual(t.L, x):
        raise AlgebraError("input is not a Maurer-Cartan element")
    return t.pushforward(x)


def load_contraction(text: str, cutoff: int) -> FiniteContraction:
    return FiniteContraction.from_json(json.loads(text), cutoff)


def _pair_apply(f1, f2, pairs: Mapping, g_left, f2_odd: bool, out1=None, out2=None) -> dict:
    """(f1 (x) f2) on word pairs; an odd f2 picks up (-1)^{|left|}.

    Output pairs of total weight above the cutoff are dropped, matching
    the truncation of the coproduct side.
    """
    out1 = out1 or g_left
    out2 = out2 or g_left
    cut = g_left.cutoff
    out: dict = {}
    for (a, b), c in pairs.items():
        fa = f1(a)
        if not fa:
            continue
        fb = f2(b)
        if not fb:
            continue
        sign = -1 if f2_odd and W.word_deg(g_left, a) % 2 else 1
        for wa, ca in fa.items():
            wta = W.word_weight(out1, wa)
            for wb, cb in fb.items():
                if wta + W.word_weight(out2, wb) > cut:
                    continue
                key = (wa, wb)
                v = out.get(key, 0) + sign * c * ca * cb
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return out


def _identity(word):
    return {word: Fraction(1)}


def fh_failures(lifted: CoalgebraContraction, words: Iterable) -> list[str]:
    """(p(x)p)Nh = (h(x)p)Nh = (p(x)h)Nh = (h(x)h)Nh = 0 and h^2 = ph = hi = 0."""
    gV = lifted.base.big
    gW = lifted.base.small
    P, H = lifted.p.key, lifted.h.key
    out = []
    for w in words:
        hw = H(w)
        if not hw:
            continue
        cop = W.coproduct_sum(gV, hw)
        for label, f1, f2, odd, o1, o2 in (
            ("(p*p)Nh", P, P, False, gW, gW),
            ("(h*p)Nh", H, P, False, gV, gW),
            ("(p*h)Nh", P, H, True, gW, gV),
            ("(h*h)Nh", H, H, True, gV, gV),
        ):
            if _pair_apply(f1, f2, cop, gV, odd, o1, o2):
                out.append(f"{label} != 0 on {w!r}")
        if lifted.h(hw):
            out.append(f"h^2 != 0 on {w!r}")
        if lifted.p(hw):
            out.append(f"ph != 0 on {w!r}")
    return out


def berglund_failures(t: "Transfer", big_words: Iterable, small_words: Iterable) -> list[str]:
    """Coalgebra-morphism laws for p_mu, i_mu and the coderivation law for d_mu."""
    pc = t.perturbed
    gV, gW = t.c.big, t.c.small
    out = []
    for w in big_words:
        lhs = W.coproduct_sum(gW, pc.p.key(w))
        rhs = _pair_apply(pc.p.key, pc.p.key, W.coproduct(gV, w), gV, False, gW, gW)
        if lhs != rhs:
            out.append(f"p_mu is not a coalgebra map on {w!r}")
    for w in small_words:
        lhs = W.coproduct_sum(gV, pc.i.key(w))
        rhs = _pair_apply(pc.i.key, pc.i.key, W.coproduct(gW, w), gW, False, gV, gV)
        if lhs != rhs:
            out.append(f"i_mu is not a coalgebra map on {w!r}")
        cop = W.coproduct(gW, w)
        lhs = W.coproduct_sum(gW, pc.d.key(w))
        rhs = _pair_apply(pc.d.key, _identity, cop, gW, False)
        for k, v in _pair_apply(_identity, pc.d.key, cop, gW, True).items():
            rhs[k] = rhs.get(k, 0) + v
        rhs = {k: v for k, v in rhs.items() if v}
        if lhs != rhs:
            out.append(f"d_mu is not a coderivation on {w!r}")
    return out
