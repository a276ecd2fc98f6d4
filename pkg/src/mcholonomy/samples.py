"""Seeded generators of algebras, contractions and Maurer-Cartan data for tests and demos."""

from __future__ import annotations

import random
from fractions import Fraction

from .linf import (
    CurvedLinfPresentation,
    compose_morphisms,
    direct_sum,
    invert_morphism,
    linear_section,
    projection,
    random_automorphism,
    transport_algebra,
)
from .perturb import Grading, FiniteContraction, contraction_for_algebra
from .vectors import add_into


def _rat(rng: random.Random, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice([1, 1, 2, 3]))


def random_contraction_algebra(rng: random.Random, dim: int = 3, cutoff: int = 4, pairs: int | None = None, curved: bool = True):
    """A valid curved algebra on ``dim`` vectors with a contraction onto its D-cohomology.

    D pairs a_j (deg ell) with b_j = D a_j (deg ell+1, same weight); the
    remaining vectors survive to the small space.  Higher structure comes
    from transport along a random coalgebra automorphism, which keeps the
    weight-preserving unary part equal to D.
    """
    if pairs is None:
        pairs = rng.randint(0, dim // 2)
    basis = []
    D = {}
    hmat = {}
    survivors = []
    weights = sorted(rng.randint(1, max(1, cutoff - 1)) for _ in range(dim))
    idx = 0
    for j in range(pairs):
        ell = rng.choice([-1, 0, 0, 0])
        w = weights[idx]
        a, b = f"a{j}", f"b{j}"
        basis += [(a, ell, w), (b, ell + 1, w)]
        D[a] = {b: 1}
        hmat[b] = {a: 1}
        idx += 2
    for j in range(dim - 2 * pairs):
        name = f"c{j}"
        basis.append((name, rng.choice([0, 0, 1, 1, -1]), weights[idx]))
        survivors.append(name)
        idx += 1
    brackets = {(k,): v for k, v in D.items()}
    # sources a_j and low survivors; targets b_j (D-closed) and high survivors
    surv = sorted((b for b in basis if b[0] in survivors), key=lambda b: b[2])
    cut = len(surv) // 2
    gens = [b for b in basis if b[0] in D] + surv[:cut]
    central = [b for b in basis if b[0] in hmat] + surv[cut:]
    extra = _two_step(rng, gens, central, cutoff)
    brackets.update({w: v for w, v in extra.items() if not (len(w) == 1 and w[0] in D)})
    L0 = CurvedLinfPresentation(basis, brackets, cutoff)
    phi = random_automorphism(L0, rng, curved=curved)
    L = transport_algebra(L0, phi)
    small = {k: (L.deg(k), L.weight(k)) for k in survivors}
    ident = {k: {k: 1} for k in survivors}
    c = contraction_for_algebra(L, small, ident, ident, hmat)
    return L, c


def _split(vecs: list) -> tuple[list, list]:
    """Lower half by weight as generators, the rest central."""
    if len(vecs) < 2:
        return [], []
    vecs = sorted(vecs, key=lambda b: b[2])
    cut = max(1, len(vecs) // 2)
    return vecs[:cut], vecs[cut:]


def _two_step(rng: random.Random, gens: list, central: list, cutoff: int) -> dict:
    """Random brackets of generators landing on central vectors.

    Every output is central (never an input) and D-closed, and D of an
    input is central too, so the generalised Jacobi identity holds for
    any choice of coefficients.
    """
    import itertools

    out = {}
    for r in range(0, 4):
        for word in itertools.combinations_with_replacement(gens, r):
            if any(word.count(b) > 1 and b[1] % 2 for b in word):
                continue
            dsum = sum(b[1] for b in word) + 1
            wsum = sum(b[2] for b in word)
            vec = {}
            for c in central:
                if c[1] == dsum and c[2] >= max(wsum, 1) and c[2] <= cutoff and rng.random() < 0.6:
                    vec[c[0]] = _rat(rng)
            vec = {k: v for k, v in vec.items() if v}
            if vec:
                out[tuple(b[0] for b in word)] = vec
    return out


def random_contractible(rng: random.Random, dim: int = 4, cutoff: int = 4):
    """A random contractible curved algebra (every vector paired) with h."""
    pairs = dim // 2
    return random_contraction_algebra(rng, 2 * pairs, cutoff, pairs=pairs)


def random_algebra(rng: random.Random, names: list[str], cutoff: int = 3, curved: bool = True, max_arity: int = 3):
    """A valid curved algebra on ``names``, transported along a random automorphism.

    The seed structure is a unary pairing a -> b, a curvature on a
    degree-one vector and central two-step brackets on the rest; the
    transport spreads it into brackets of every arity.
    """
    names = list(names)
    basis, brackets = [], {}
    rest = list(names)
    if len(rest) >= 2 and rng.random() < (0.3 if len(rest) == 3 else 0.7):
        a, b = rest.pop(0), rest.pop(0)
        deg = rng.choice([-1, -1, 0])
        wa = rng.randint(1, cutoff)
        basis += [(a, deg, wa), (b, deg + 1, rng.randint(wa, cutoff))]
        brackets[(a,)] = {b: _rat(rng) or 1}
    if rest and curved and rng.random() < 0.5:
        c = rest.pop()
        basis.append((c, 1, rng.randint(1, cutoff)))
        brackets[()] = {c: _rat(rng) or 1}
    if rest:
        if len(rest) >= 3 and cutoff >= 2 and rng.random() < 0.7:
            # a Heisenberg-like core: two generators of weight 1, the rest central
            weights = [1, 1] + sorted(rng.randint(2, cutoff) for _ in rest[2:])
            more = [(nm, -1, w) for nm, w in zip(rest, weights)]
        else:
            weights = sorted([1] + [rng.randint(1, cutoff) for _ in rest[1:]])
            # mostly degree -1 so that binary brackets of generators land on central vectors
            more = [(nm, rng.choice([-1, -1, -1, 0]), w) for nm, w in zip(rest, weights)]
        basis += more
        brackets.update(_two_step(rng, *_split(more), cutoff))
    order = {nm: j for j, nm in enumerate(names)}
    basis.sort(key=lambda t: order[t[0]])
    L0 = CurvedLinfPresentation(basis, brackets, cutoff)
    return transport_algebra(L0, random_automorphism(L0, rng, curved=curved, max_arity=max_arity))


def random_fibration_diagram(rng: random.Random, dim: int = 4, cutoff: int = 3, max_arity: int = 3):
    """A cospan L -f-> M <-g- N with f a fibration, and a linear section of df.

    L is M + E twisted by a random automorphism phi, f = pr . phi^{-1} and
    the section is the linear part of phi on M.  N is either a twisted
    copy of M mapped isomorphically, or another twisted extension of M.
    """
    m = rng.randint(1, max(1, dim - 1))
    e = rng.randint(1, max(1, dim - m))
    M = random_algebra(rng, [f"m{j}" for j in range(m)], cutoff, max_arity=max_arity)
    E = random_algebra(rng, [f"e{j}" for j in range(e)], cutoff, max_arity=max_arity)
    S = direct_sum(M, E)
    phi = random_automorphism(S, rng, curved=True, max_arity=max_arity)
    L = transport_algebra(S, phi)
    phi.target = L
    inv = invert_morphism(phi)
    inv.source, inv.target = L, S
    f = compose_morphisms(projection(S, M), inv)
    if rng.random() < 0.5:
        chi = random_automorphism(M, rng, curved=True, max_arity=max_arity)
        N = transport_algebra(M, chi)
        g = invert_morphism(chi)
        g.source, g.target = N, M
    else:
        n_extra = rng.randint(1, max(1, dim - m))
        E2 = random_algebra(rng, [f"n{j}" for j in range(n_extra)], cutoff, max_arity=max_arity)
        S2 = direct_sum(M, E2)
        psi = random_automorphism(S2, rng, curved=True, max_arity=max_arity)
        N = transport_algebra(S2, psi)
        inv2 = invert_morphism(psi)
        inv2.source, inv2.target = N, S2
        g = compose_morphisms(projection(S2, M), inv2)
    return f, linear_section(f), g


def random_massey(rng: random.Random, cutoff: int = 3):
    """A transported copy of {u} = e, {a, a} = e, {u, a} = m with random coefficients.

    Contracting u and e away leaves a and m with a nonzero ternary
    bracket on a, a, a.  Returns (L, c).
    """
    alpha, beta = (_rat(rng) or 1 for _ in range(2))
    basis = [("a", 0, 1), ("u", 0, 2), ("e", 1, 2), ("m", 1, 3)]
    brackets = {("u",): {"e": 1}, ("a", "a"): {"e": alpha}, ("u", "a"): {"m": beta}}
    L0 = CurvedLinfPresentation(basis, brackets, cutoff)
    phi = random_automorphism(L0, rng, curved=rng.random() < 0.5)
    L = transport_algebra(L0, phi)
    small = {"a": (0, 1), "m": (1, 3)}
    ident = {k: {k: 1} for k in small}
    return L, contraction_for_algebra(L, small, ident, ident, {"e": {"u": 1}})
