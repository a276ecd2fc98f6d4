"""Independent reference computations used by the tests.

None of these import the code they check: integrals come from the Beta
function on the simplex, BCH from the free associative algebra, holonomy
from Picard iteration of 3x3 matrix ODEs, transfer from the tree formula.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial


# -------------------------------------------------------------- Koszul signs


def brute_koszul(degrees, order):
    """Sign of a permutation of graded symbols, by counting odd inversions pairwise."""
    sign = 1
    for a, b in itertools.combinations(range(len(order)), 2):
        x, y = order[a], order[b]
        if x > y and degrees[x] % 2 and degrees[y] % 2:
            sign = -sign
    return sign


# -------------------------------------------------------------- integration


def simplex_integral(exp):
    """Integral of t_1^a_1 ... t_n^a_n over the standard simplex in (t_1, ..., t_n)."""
    n = len(exp)
    num = 1
    for a in exp:
        num *= factorial(a)
    return Fraction(num, factorial(sum(exp) + n))


def top_integral(form):
    """Integral of a form over its simplex, oriented by dt_1 ... dt_n."""
    n = form.n
    top = tuple(range(1, n + 1))
    return sum((c * simplex_integral(exp) for (exp, ds), c in form.terms.items() if ds == top), Fraction(0))


# -------------------------------------------------------------- free associative algebra


def _nc_mul(a, b, depth):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            if len(w) <= depth:
                out[w] = out.get(w, 0) + ca * cb
    return {w: c for w, c in out.items() if c}


def _nc_add(a, b, s=1):
    out = dict(a)
    for w, c in b.items():
        out[w] = out.get(w, 0) + s * c
    return {w: c for w, c in out.items() if c}


def nc_exp(x, depth):
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for k in range(1, depth + 1):
        power = _nc_mul(power, x, depth)
        out = _nc_add(out, {w: c / factorial(k) for w, c in power.items()})
    return out


def nc_log(u, depth):
    """log(1 + y) = sum (-1)^{k+1} y^k / k for y without constant term."""
    y = {w: c for w, c in u.items() if w}
    out = {}
    power = {(): Fraction(1)}
    for k in range(1, depth + 1):
        power = _nc_mul(power, y, depth)
        out = _nc_add(out, {w: Fraction((-1) ** (k + 1), k) * c for w, c in power.items()})
    return out


def nc_bracket(a, b, depth):
    return _nc_add(_nc_mul(a, b, depth), _nc_mul(b, a, depth), -1)


def free_bch(depth):
    """log(e^x e^y) in the free associative algebra on x, y, truncated at length ``depth``."""
    x = {("x",): Fraction(1)}
    y = {("y",): Fraction(1)}
    return nc_log(_nc_mul(nc_exp(x, depth), nc_exp(y, depth), depth), depth)


# -------------------------------------------------------------- matrices


def mat_zero(n):
    return [[Fraction(0)] * n for _ in range(n)]


def mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def mat_add(a, b, s=1):
    return [[a[i][j] + s * b[i][j] for j in range(len(a))] for i in range(len(a))]


def mat_scale(a, c):
    return [[c * v for v in row] for row in a]


def mat_exp_nilpotent(a):
    n = len(a)
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    power = [row[:] for row in out]
    for k in range(1, n):
        power = mat_mul(power, a)
        out = mat_add(out, mat_scale(power, Fraction(1, factorial(k))))
    return out


def mat_log_unipotent(u):
    n = len(u)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    y = mat_add(u, ident, -1)
    out = mat_zero(n)
    power = ident
    for k in range(1, n):
        power = mat_mul(power, y)
        out = mat_add(out, mat_scale(power, Fraction((-1) ** (k + 1), k)))
    return out


def mat_commutator(a, b):
    return mat_add(mat_mul(a, b), mat_mul(b, a), -1)


# -------------------------------------------------------------- one-variable polynomials


def poly_mul(p, q):
    out = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, 0) + a * b
    return {k: v for k, v in out.items() if v}


def poly_integral(p):
    """Antiderivative vanishing at 0."""
    return {k + 1: Fraction(v) / (k + 1) for k, v in p.items()}


def poly_at_one(p):
    return sum(p.values(), Fraction(0))


def heisenberg_holonomy(a, b):
    """log of the ordered exponential of A = a(t) X + b(t) Y on [0, 1], earlier times on the left.

    X = E12, Y = E23, Z = E13; a, b are polynomials {power: coefficient}.
    U' = U A, U(0) = 1 is solved exactly by Picard iteration (A is nilpotent).
    """
    # U = [[1, u12, u13], [0, 1, u23], [0, 0, 1]]
    u12 = poly_integral(a)
    u23 = poly_integral(b)
    u13 = poly_integral(poly_mul(u12, b))
    x, y, z = poly_at_one(u12), poly_at_one(u23), poly_at_one(u13)
    # log of [[1, x, z], [0, 1, y], [0, 0, 1]] = x E12 + y E23 + (z - xy/2) E13
    return {"X": x, "Y": y, "Z": z - x * y / 2}
