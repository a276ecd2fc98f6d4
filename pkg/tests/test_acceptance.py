"""Acceptance criteria 1 to 10, each printing one PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from mcholonomy import words as W
from mcholonomy.dupont import dupont_s, dupont_terms, faces, monomials, p_rank, project_p, whitney_form
from mcholonomy.forms import AffineSimplexMap, FormFamily, PolyForm, d, eval_vertex, extend_section, poincare_h, restrict_to_face
from mcholonomy.holonomy import (
    bch_oracle,
    compose_edges,
    cone,
    edge,
    edge_value,
    fill_horn,
    free_nilpotent_3,
    gamma_check,
    gamma_morphism,
    heisenberg,
    horn_from_simplex,
    is_thin,
    apply_strict,
    rho,
    section_simplex,
    whitney_part,
    wrap_lie,
    GaugeTransfer,
    pushforward_simplex,
)
from mcholonomy.linf import (
    all_words,
    check_morphism,
    compose_morphisms,
    curvature_residual,
    fibered_product,
    morphism_difference,
    strict_morphism,
    validate_algebra,
)
from mcholonomy.perturb import berglund_failures, fh_failures, kuranishi_solve, lift_contraction_to_coalgebra, transfer_structure
from mcholonomy.samples import random_contractible, random_contraction_algebra, random_fibration_diagram
from mcholonomy.tensor import FormValuedElement, mc_residual_on_simplex, restrict

G_HEIS = heisenberg()
G_FREE = free_nilpotent_3()
HEIS = wrap_lie(G_HEIS)
FREE = wrap_lie(G_FREE)
CONE = wrap_lie(cone(G_HEIS))


@pytest.fixture
def report(capsys):
    def emit(number, title, failures, extra=""):
        status = "PASS" if not failures else "FAIL"
        line = f"criterion {number:>2} {status}  {title}"
        if extra:
            line += f"  [{extra}]"
        if failures:
            line += f"  first failure: {failures[0]}"
        with capsys.disabled():
            print("\n" + line)
        assert not failures, failures[:5]

    return emit


def rat(rng, span=3):
    return Fraction(rng.randint(-span, span), rng.randint(1, 3))


def lie_vec(rng, names="XY"):
    v = {k: rat(rng) for k in names}
    return {k: c for k, c in v.items() if c}


def random_form(rng, n, max_poly):
    out = PolyForm.zero(n)
    for exp, ds in rng.sample(monomials(n, max_poly), 4):
        out = out + PolyForm.monomial(n, exp, ds, rat(rng))
    return out


def random_path(rng, names="XYZ", degree=2):
    t, dt = PolyForm.t(1, 1), PolyForm.dt(1, 1)
    out = {}
    for k in names:
        poly, power = PolyForm.zero(1), PolyForm.const(1, 1)
        for _ in range(degree + 1):
            poly = poly + power.scale(rat(rng))
            power = power * t
        out[k] = poly * dt
    return FormValuedElement(1, out)


def random_flat(rng):
    """da X + db Y + (de - a db) Z on the triangle."""

    def rp():
        out = PolyForm.zero(2)
        for _ in range(3):
            out = out + PolyForm.monomial(2, (rng.randint(0, 2), rng.randint(0, 2)), (), rat(rng))
        return out

    a, b, e = rp(), rp(), rp()
    return FormValuedElement(2, {"X": d(a), "Y": d(b), "Z": d(e) - a * d(b)})


def filler(L, a, b):
    return fill_horn(L, 2, 1, {2: edge(L, 1, a), 0: edge(L, 1, b)})


# ---------------------------------------------------------------- 1


def test_criterion_1_dupont_suite(report):
    start = time.perf_counter()
    bad = []
    for n in (1, 2, 3):
        zero = PolyForm.zero(n)
        for exp, ds in monomials(n, 3):
            a = PolyForm.monomial(n, exp, ds)
            for i in range(n + 1):
                eps = PolyForm.const(n, eval_vertex(i, a))
                if d(poincare_h(i, a)) + poincare_h(i, d(a)) != a - eps:
                    bad.append(f"dh^{i} + h^{i}d on n={n} {exp} {ds}")
            pa, sa = project_p(n, a), dupont_s(n, a)
            if d(sa) + dupont_s(n, d(a)) != a - pa:
                bad.append(f"ds + sd on n={n} {exp} {ds}")
            if project_p(n, pa) != pa:
                bad.append(f"p^2 on n={n} {exp} {ds}")
            if dupont_s(n, sa) != zero:
                bad.append(f"s^2 on n={n} {exp} {ds}")
            if project_p(n, sa) != zero:
                bad.append(f"ps on n={n} {exp} {ds}")
        for face in faces(n):
            if dupont_s(n, whitney_form(face, n)) != zero:
                bad.append(f"si on n={n} face {face}")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        bad.append(f"runtime {elapsed:.1f}s >= 60s")
    report(1, "Dupont suite, n = 1..3, degree <= 3", bad, f"{elapsed:.1f}s")


# ---------------------------------------------------------------- 2


def test_criterion_2_structural_counts(report):
    bad = []
    for n in range(1, 5):
        count = len(dupont_terms(n))
        if count != 2 ** (n + 1) - 2:
            bad.append(f"s_{n} has {count} terms")
        rank = p_rank(n, 2)
        if rank != 2 ** (n + 1) - 1:
            bad.append(f"rank p_{n} = {rank}")
    report(2, "s_n term count and rank of p_n, n = 1..4", bad)


# ---------------------------------------------------------------- 3


def test_criterion_3_extension_lemma(report):
    rng = random.Random(3)
    bad = []
    for n in (1, 2):
        for k in range(20):
            a = random_form(rng, n, 2)
            shape = "boundary" if k % 2 == 0 else "horn"
            fam = FormFamily.restrict(a, shape, rng.randint(0, n) if shape == "horn" else None)
            ext = extend_section(fam)
            for j, f in fam.faces.items():
                if restrict_to_face(ext, j) != f:
                    bad.append(f"n={n} family {k} face {j}")
    report(3, "extension restricts to every face, 20 families per n", bad)


# ---------------------------------------------------------------- 4


def test_criterion_4_berglund_suite(report):
    bad = []
    nonzero = 0
    for seed in range(10):
        L, c = random_contraction_algebra(random.Random(seed), dim=3, cutoff=4, pairs=1)
        words = all_words(c.big, 4)
        lifted = lift_contraction_to_coalgebra(c, max_len=4)
        bad += [f"seed {seed}: {f}" for f in fh_failures(lifted, words)]
        t = transfer_structure(L, c, max_len=4)
        small = W.words_up_to_weight(c.small, c.small.keys(), c.small.cutoff, 4)
        bad += [f"seed {seed}: {f}" for f in berglund_failures(t, words, small)]
        nonzero += sum(1 for w in small if t.bracket_word(w))
    report(4, "fh identities and transfer laws, 10 contractions, length <= 4", bad, f"{nonzero} nonzero transferred brackets")


# ---------------------------------------------------------------- 5


def test_criterion_5_kuranishi(report):
    bad = []
    for seed in range(10):
        rng = random.Random(seed)
        L, c = random_contractible(rng, dim=rng.choice([2, 4]), cutoff=4)
        x = kuranishi_solve(L, c)
        if c.h(x) or curvature_residual(L, x):
            bad.append(f"seed {seed}: h x or residual nonzero")
        kernel = [k for k in L.keys() if not c.h.key(k) and L.deg(k) == 0]
        for _ in range(2):
            other = {k: rng.randint(-3, 3) for k in kernel}
            if kuranishi_solve(L, c, seed={k: v for k, v in other.items() if v}) != x:
                bad.append(f"seed {seed}: solution depends on the starting point")
    report(5, "Kuranishi on 10 contractible algebras", bad)


# ---------------------------------------------------------------- 6


def test_criterion_6_mc_bijection(report):
    rng = random.Random(6)
    gt = GaugeTransfer.get(HEIS, 1)
    bad = []
    for k in range(10):
        x = random_path(rng)
        y = pushforward_simplex(HEIS, x)
        # y is a Maurer-Cartan element of the transferred algebra
        if pushforward_simplex(HEIS, section_simplex(HEIS, 1, y)) != y:
            bad.append(f"sample {k}: p_mu i_mu != id")
        z = section_simplex(HEIS, 1, y)
        if gt.c.h(z.to_vector()):
            bad.append(f"sample {k}: section leaves the gauge locus")
        if section_simplex(HEIS, 1, pushforward_simplex(HEIS, z)) != z:
            bad.append(f"sample {k}: i_mu p_mu != id on the gauge locus")
    report(6, "MC bijection on forms on the interval with Heisenberg values", bad)


# ---------------------------------------------------------------- 7


def test_criterion_7_holonomy_bch(report):
    start = time.perf_counter()
    bad = []
    third = compose_edges(HEIS, {"X": 1}, {"Y": 1})
    if third != {"X": 1, "Y": 1, "Z": Fraction(1, 2)}:
        bad.append(f"unit edges give {third}")
    rng = random.Random(7)
    cases = [({"X": 1}, {"Y": 1})] + [(lie_vec(rng, "XYZUV"), lie_vec(rng, "XYZUV")) for _ in range(10)]
    for a, b in cases:
        x = filler(FREE, a, b)
        got = edge_value(restrict(x, AffineSimplexMap.face(2, 1)))
        want = bch_oracle(G_FREE.lie_bracket, a, b)
        if got != want:
            bad.append(f"{a}, {b}: {got} != {want}")
    if compose_edges(FREE, {"X": 1}, {"Y": 1}).get("U") != Fraction(1, 12):
        bad.append("missing the 1/12 term")
    elapsed = time.perf_counter() - start
    if elapsed >= 120:
        bad.append(f"runtime {elapsed:.1f}s >= 120s")
    report(7, "horn composition is BCH (Heisenberg, free 3-step)", bad, f"{elapsed:.1f}s")


# ---------------------------------------------------------------- 8


def _gamma_elements(rng):
    out = []
    for _ in range(10):
        out.append(edge(HEIS, 1, lie_vec(rng, "XYZ")))
        out.append(rho(HEIS, random_path(rng)))
        out.append(section_simplex(HEIS, 1, {(k, (0, 1)): v for k, v in lie_vec(rng, "XYZ").items()}))
        out.append(filler(HEIS, lie_vec(rng, "XYZ"), lie_vec(rng, "XYZ")))
        out.append(rho(HEIS, random_flat(rng)))
    return out


def _morphisms():
    return [
        (HEIS, HEIS, {"X": {"X": 2}, "Y": {"Y": 1}, "Z": {"Z": 2}}),
        (HEIS, HEIS, {"X": {"X": 1, "Y": 1}, "Y": {"Y": 1}, "Z": {"Z": 1}}),
        (HEIS, HEIS, {"X": {"X": 1, "Z": 3}, "Y": {"Y": 1, "Z": -1}, "Z": {"Z": 1}}),
        (FREE, HEIS, {"X": {"X": 1}, "Y": {"Y": 1}, "Z": {"Z": 1}, "U": {}, "V": {}}),
        (HEIS, CONE, {"X": {"X": 1}, "Y": {"Y": 1}, "Z": {"Z": 1}}),
    ]


def test_criterion_8_retraction_and_naturality(report):
    rng = random.Random(8)
    bad = []
    elements = _gamma_elements(rng)
    for k, g in enumerate(elements):
        if not gamma_check(HEIS, g):
            bad.append(f"element {k} is not in the gauge locus")
        elif rho(HEIS, g) != g:
            bad.append(f"element {k}: rho(incl) != id")
    for index, (src, tgt, mat) in enumerate(_morphisms()):
        f = strict_morphism(src, tgt, mat)
        if check_morphism(f):
            bad.append(f"morphism {index} invalid")
            continue
        names = "XYZ" if src is HEIS else "XYZUV"
        samples = [random_path(rng, names), filler(src, lie_vec(rng, names), lie_vec(rng, names))]
        if src is HEIS:
            samples.append(random_flat(rng))
        for x in samples:
            lhs = whitney_part(rho(tgt, apply_strict(f, x)))
            rhs = gamma_morphism(f, x.n, whitney_part(rho(src, x)))
            if lhs != rhs:
                bad.append(f"morphism {index}: rho MC(f) != gamma(f) rho on a {x.n}-simplex")
    report(8, "rho retracts onto 50 gauge elements, natural for 5 morphisms", bad, f"{len(elements)} elements")


# ---------------------------------------------------------------- 9


def test_criterion_9_semiabelian_strictness(report):
    rng = random.Random(9)
    bad = []
    zero = FormValuedElement(1, {})
    for i in (1, 2):
        # thin edges of the cone vanish, so every thin 2-horn is zero
        faces_ = {j: zero for j in range(3) if j != i}
        x = fill_horn(CONE, 2, i, faces_)
        if not is_thin(x) or any(not is_thin(restrict(x, AffineSimplexMap.face(2, j))) for j in range(3)):
            bad.append(f"n=2, i={i}: filler or face not thin")
    for k in range(10):
        a, b, c = (lie_vec(rng, "XYZ") for _ in range(3))
        bc = compose_edges(CONE, b, c)
        spine = {3: filler(CONE, a, b), 0: filler(CONE, b, c), 2: filler(CONE, a, bc)}
        whole = fill_horn(CONE, 3, 1, spine)
        i = rng.randint(1, 3)
        horn = horn_from_simplex(whole, i)
        if not all(is_thin(f) for f in horn.values()):
            bad.append(f"horn {k} is not thin")
            continue
        x = fill_horn(CONE, 3, i, horn)
        if not is_thin(x):
            bad.append(f"horn {k}, i={i}: filler not thin")
        for j in range(4):
            if not is_thin(restrict(x, AffineSimplexMap.face(3, j))):
                bad.append(f"horn {k}, i={i}: face {j} not thin")
    report(9, "thin horns in the cone of Heisenberg have thin fillers and faces", bad)


# ---------------------------------------------------------------- 10


def test_criterion_10_fibered_product(report):
    bad = []
    for seed in range(5):
        f, s, g = random_fibration_diagram(random.Random(100 + seed), dim=4, cutoff=3, max_arity=3)
        fp = fibered_product(f, s, g)
        bad += [f"seed {seed}: {v}" for v in validate_algebra(fp.P)]
        bad += [f"seed {seed}: G {v}" for v in check_morphism(fp.G)]
        bad += [f"seed {seed}: F {v}" for v in check_morphism(fp.F)]
        bad += [f"seed {seed}: {v}" for v in morphism_difference(compose_morphisms(f, fp.G), compose_morphisms(g, fp.F))]
    report(10, "pullbacks of 5 random fibrations commute and validate", bad)
