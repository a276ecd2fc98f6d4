"""Truncated symmetric coalgebra on a graded space with weights.

A word is a canonical tuple of basis keys (see ``signs.canonical_word``);
a word sum is a dict from words to Fractions.  Every routine drops words
whose total weight exceeds the cutoff, which is exact for anything read
off in length one because all maps here are weight non-decreasing.

The grading object ``g`` only needs ``deg(key)``, ``weight(key)`` and an
integer ``cutoff``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .signs import canonical_word, shuffle_sign
from .vectors import Vector, add_into, add_term, fraction_str, to_fraction

Word = tuple
WordSum = dict


class CutoffError(ArithmeticError):
    """Raised when a truncation would silently drop visible terms."""


def word_deg(g, word: Sequence) -> int:
    return sum(g.deg(k) for k in word)


def word_weight(g, word: Sequence) -> int:
    return sum(g.weight(k) for k in word)


def canon(g, keys: Sequence) -> tuple[int, Word]:
    return canonical_word(keys, g.deg)


def times_vector(g, ws: Mapping, vec: Mapping, front: bool = False) -> WordSum:
    """Multiply every word of ``ws`` by a vector of letters (on the right, or left)."""
    out: WordSum = {}
    cut = g.cutoff
    for w, c in ws.items():
        base = word_weight(g, w)
        for k, v in vec.items():
            if base + g.weight(k) > cut:
                continue
            sign, word = canon(g, (k,) + w if front else w + (k,))
            if sign:
                add_term(out, word, sign * c * v)
    return out


def product_of_vectors(g, vectors: Iterable[Mapping]) -> WordSum:
    """The symmetric product v_1 v_2 ... v_m as a word sum."""
    out: WordSum = {(): Fraction(1)}
    for vec in vectors:
        out = times_vector(g, out, vec)
        if not out:
            break
    return out


def multiply(g, a: Mapping, b: Mapping) -> WordSum:
    out: WordSum = {}
    cut = g.cutoff
    for w1, c1 in a.items():
        wt = word_weight(g, w1)
        for w2, c2 in b.items():
            if wt + word_weight(g, w2) > cut:
                continue
            sign, word = canon(g, w1 + w2)
            if sign:
                add_term(out, word, sign * c1 * c2)
    return out


def exp_vector(g, x: Mapping) -> WordSum:
    """exp(x) = sum x^n / n!, truncated by weight (x must have weight >= 1)."""
    out: WordSum = {(): Fraction(1)}
    power: WordSum = {(): Fraction(1)}
    n = 0
    while True:
        n += 1
        power = times_vector(g, power, x)
        if not power:
            return out
        add_into(out, power, Fraction(1, factorial(n)))
        if n > g.cutoff:
            raise CutoffError("exp of an element without positive weight")


def component(ws: Mapping, length: int) -> WordSum:
    return {w: c for w, c in ws.items() if len(w) == length}


def linear_part(ws: Mapping) -> Vector:
    """The length-one component as a vector of keys."""
    return {w[0]: c for w, c in ws.items() if len(w) == 1}


def as_words(vec: Mapping) -> WordSum:
    return {(k,): c for k, c in vec.items()}


def subsets(n: int) -> Iterator[tuple[int, ...]]:
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def coproduct(g, word: Word) -> dict:
    """Unshuffle coproduct: sum over position subsets I of sign x_I (x) x_{I^c}."""
    out: dict = {}
    degs = [g.deg(k) for k in word]
    n = len(word)
    for first in subsets(n):
        sign = shuffle_sign(degs, first)
        rest = tuple(j for j in range(n) if j not in first)
        left = tuple(word[j] for j in first)
        right = tuple(word[j] for j in rest)
        add_term(out, (left, right), Fraction(sign))
    return out


def coproduct_sum(g, ws: Mapping) -> dict:
    out: dict = {}
    for w, c in ws.items():
        add_into(out, coproduct(g, w), c)
    return out


def coderivation(g, comp: Callable[[Word], Mapping], word: Word, arities=None) -> WordSum:
    """Extend length-one components to a coderivation of odd degree.

    ``comp(sub)`` receives the canonical sub-word and returns a vector; the
    result is sum_I sign(I) comp(x_I) . x_{I^c}.  ``arities`` restricts |I|.
    """
    out: WordSum = {}
    n = len(word)
    degs = [g.deg(k) for k in word]
    sizes = range(n + 1) if arities is None else [a for a in arities if a <= n]
    seen: dict = {}
    for r in sizes:
        for first in itertools.combinations(range(n), r):
            sub = tuple(word[j] for j in first)
            rest = tuple(word[j] for j in range(n) if j not in first)
            key = (sub, rest)
            sign = shuffle_sign(degs, first)
            seen[key] = seen.get(key, 0) + sign
    cut = g.cutoff
    for (sub, rest), mult in seen.items():
        if not mult:
            continue
        vec = comp(sub)
        if not vec:
            continue
        rest_wt = word_weight(g, rest)
        for k, v in vec.items():
            if rest_wt + g.weight(k) > cut:
                continue
            sign, w = canon(g, (k,) + rest)
            if sign:
                add_term(out, w, sign * mult * v)
    return out


def letterwise(g_out, f: Callable[[Hashable], Mapping], word: Word) -> WordSum:
    """f^{(x) n} for a degree-zero map f."""
    return product_of_vectors(g_out, [f(k) for k in word])


def symmetrized_homotopy(g, h, ip, word: Word) -> WordSum:
    """The tensor-trick homotopy on one word.

    (1/n) sum_k sum_{T subset of [n] minus k} binom(n-1,|T|)^{-1} times the
    product with ip on T, h at slot k and the identity elsewhere, with the
    Koszul sign of h passing the letters before slot k.
    """
    n = len(word)
    if n == 0:
        return {}
    out: WordSum = {}
    degs = [g.deg(k) for k in word]
    ident = lambda k: {k: Fraction(1)}
    for k in range(n):
        hk = h(word[k])
        if not hk:
            continue
        sign = -1 if sum(degs[:k]) % 2 else 1
        others = [j for j in range(n) if j != k]
        for r in range(n):
            weight = Fraction(sign, n * comb(n - 1, r))
            for T in itertools.combinations(others, r):
                Tset = set(T)
                vecs = []
                for j in range(n):
                    if j == k:
                        vecs.append(hk)
                    elif j in Tset:
                        vecs.append(ip(word[j]))
                    else:
                        vecs.append(ident(word[j]))
                add_into(out, product_of_vectors(g, vecs), weight)
    return out


def words_up_to_weight(g, keys: Sequence, max_weight: int, max_len: int | None = None) -> list[Word]:
    """All canonical words (odd letters not repeated) of weight <= max_weight."""
    keys = sorted(keys)
    out: list[Word] = []

    def rec(start: int, word: tuple, wt: int):
        out.append(word)
        if max_len is not None and len(word) >= max_len:
            return
        for idx in range(start, len(keys)):
            k = keys[idx]
            w = wt + g.weight(k)
            if w > max_weight:
                continue
            if g.deg(k) % 2 and word and word[-1] == k:
                continue
            rec(idx, word + (k,), w)

    rec(0, (), 0)
    return out


class SymWordSum:
    """A truncated element of the symmetric coalgebra, with word arithmetic."""

    __slots__ = ("grading", "terms")

    def __init__(self, grading, terms: Mapping | None = None):
        self.grading = grading
        self.terms: WordSum = {}
        for w, c in (terms or {}).items():
            sign, word = canon(grading, w)
            if sign and word_weight(grading, word) <= grading.cutoff:
                add_term(self.terms, word, sign * to_fraction(c))

    @classmethod
    def exp(cls, grading, x: Mapping) -> "SymWordSum":
        return cls._wrap(grading, exp_vector(grading, x))

    @classmethod
    def _wrap(cls, grading, terms: WordSum) -> "SymWordSum":
        obj = cls.__new__(cls)
        obj.grading = grading
        obj.terms = terms
        return obj

    def component(self, length: int) -> "SymWordSum":
        return SymWordSum._wrap(self.grading, component(self.terms, length))

    def linear(self) -> Vector:
        return linear_part(self.terms)

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __add__(self, other: "SymWordSum") -> "SymWordSum":
        return SymWordSum._wrap(self.grading, add_into(dict(self.terms), other.terms))

    def __sub__(self, other: "SymWordSum") -> "SymWordSum":
        return SymWordSum._wrap(self.grading, add_into(dict(self.terms), other.terms, -1))

    def __mul__(self, other: "SymWordSum") -> "SymWordSum":
        return SymWordSum._wrap(self.grading, multiply(self.grading, self.terms, other.terms))

    def __eq__(self, other):
        return isinstance(other, SymWordSum) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"SymWordSum({self.terms})"

    def coproduct(self) -> dict:
        return coproduct_sum(self.grading, self.terms)

    def to_json(self) -> list:
        return [
            {"word": [str(k) for k in w], "coef": fraction_str(c)}
            for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), repr(t[0])))
        ]
