"""Sparse exact vectors: plain dicts from hashable keys to Fractions."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, Mapping

Vector = Dict[Hashable, Fraction]


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def add_into(acc: Vector, vec: Mapping, coef=1) -> Vector:
    """acc += coef * vec, dropping zeros.  Returns acc."""
    if not coef:
        return acc
    for k, v in vec.items():
        c = acc.get(k, 0) + coef * v
        if c:
            acc[k] = c
        else:
            acc.pop(k, None)
    return acc


def add_term(acc: Vector, key, coef) -> None:
    if not coef:
        return
    c = acc.get(key, 0) + coef
    if c:
        acc[key] = c
    else:
        del acc[key]


def scale(vec: Mapping, coef) -> Vector:
    if not coef:
        return {}
    return {k: coef * v for k, v in vec.items()}


def combine(pairs: Iterable) -> Vector:
    """Sum of coef * vec over (coef, vec) pairs."""
    acc: Vector = {}
    for coef, vec in pairs:
        add_into(acc, vec, coef)
    return acc


def apply_linear(fn: Callable[[Hashable], Mapping], vec: Mapping) -> Vector:
    """Extend a key -> vector function linearly."""
    acc: Vector = {}
    for k, c in vec.items():
        add_into(acc, fn(k), c)
    return acc


class LinearOp:
    """A linear map given on basis keys, memoized per key.

    The cache is per instance and only ever stores values computed from
    immutable inputs, so sharing an operator between threads is safe in the
    sense that racing writers store identical values.
    """

    def __init__(self, on_key: Callable[[Hashable], Mapping], name: str = "op"):
        self._on_key = on_key
        self._cache: dict = {}
        self.name = name

    def key(self, k) -> Mapping:
        try:
            return self._cache[k]
        except KeyError:
            val = self._on_key(k)
            self._cache[k] = val
            return val

    def __call__(self, vec: Mapping) -> Vector:
        acc: Vector = {}
        for k, c in vec.items():
            add_into(acc, self.key(k), c)
        return acc

    def __repr__(self):
        return f"LinearOp({self.name})"

    @staticmethod
    def zero() -> "LinearOp":
        return LinearOp(lambda k: {}, "0")

    @staticmethod
    def identity() -> "LinearOp":
        return LinearOp(lambda k: {k: Fraction(1)}, "1")

    @staticmethod
    def from_matrix(columns: Mapping[Hashable, Mapping], name: str = "matrix") -> "LinearOp":
        """Columns map a source key to its image vector; missing keys map to 0."""
        cols = {k: dict(v) for k, v in columns.items()}
        return LinearOp(lambda k: cols.get(k, {}), name)

    def then(self, other: "LinearOp") -> "LinearOp":
        """other o self."""
        return LinearOp(lambda k: other(self.key(k)), f"{other.name}*{self.name}")

    def __add__(self, other: "LinearOp") -> "LinearOp":
        return LinearOp(
            lambda k: add_into(dict(self.key(k)), other.key(k)), f"({self.name}+{other.name})"
        )

    def __sub__(self, other: "LinearOp") -> "LinearOp":
        return LinearOp(
            lambda k: add_into(dict(self.key(k)), other.key(k), -1),
            f"({self.name}-{other.name})",
        )
