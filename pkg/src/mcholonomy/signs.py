"""Koszul signs for graded-commutative words.

Every module that reorders graded symbols goes through these two
functions, so there is exactly one place where signs are decided.
"""

from __future__ import annotations

from typing import Callable, Hashable, Sequence


def koszul_sign(degrees: Sequence[int], order: Sequence[int]) -> int:
    """Sign of moving symbols of the given degrees into ``order``.

    ``order[k]`` is the index (into ``degrees``) of the symbol that ends up
    in position ``k``.  Only odd-odd transpositions contribute.
    """
    sign = 1
    odd = [degrees[j] % 2 for j in order]
    for a in range(len(order)):
        if not odd[a]:
            continue
        for b in range(a + 1, len(order)):
            if odd[b] and order[a] > order[b]:
                sign = -sign
    return sign


def canonical_word(
    keys: Sequence[Hashable], deg: Callable[[Hashable], int]
) -> tuple[int, tuple]:
    """Sort ``keys`` into canonical order in the free graded-commutative algebra.

    Returns ``(sign, word)``; ``sign`` is 0 when an odd symbol repeats.
    """
    items = list(keys)
    sign = 1
    # insertion sort, flipping the sign on every odd/odd swap
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1] > items[b]:
            if deg(items[b - 1]) % 2 and deg(items[b]) % 2:
                sign = -sign
            items[b - 1], items[b] = items[b], items[b - 1]
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1] and deg(items[a]) % 2:
            return 0, ()
    return sign, tuple(items)


def shuffle_sign(degrees: Sequence[int], first: Sequence[int]) -> int:
    """Sign of moving the positions in ``first`` (kept in order) to the front."""
    chosen = set(first)
    rest = [j for j in range(len(degrees)) if j not in chosen]
    return koszul_sign(degrees, list(first) + rest)
