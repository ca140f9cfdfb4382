"""Ring kernel: Gröbner bases, normal forms, syzygies, evaluation.

Expected values come from independent oracles where they are not
immediate: the univariate case against the Euclidean gcd, elimination
against parametrization, and syzygy completeness against a brute-force
degree-bounded kernel search over the coefficient field.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from perfx import linalg
from perfx.fields import GF, QQ
from perfx.groebner import mono_divides, mono_mul
from perfx.modules import syzygies
from perfx.orders import LEX
from perfx.rings import (
    Mat,
    PolyRing,
    RationalPoint,
    evaluate_matrix,
    groebner_basis,
    normal_form,
    syzygy_matrix,
)


def poly_gcd_univariate(a, b):
    """Euclidean algorithm on coefficient lists over QQ (oracle)."""
    def degree(c):
        return len(c) - 1

    def rem(f, g):
        f = list(f)
        while len(f) >= len(g) and any(f):
            factor = f[-1] / g[-1]
            shift = len(f) - len(g)
            for i, c in enumerate(g):
                f[shift + i] -= factor * c
            while f and f[-1] == 0:
                f.pop()
        return f or [Fraction(0)]

    while any(b):
        a, b = b, rem(a, b)
    lead = a[-1]
    return [c / lead for c in a]


def test_univariate_gb_is_gcd():
    ring = PolyRing(QQ, ["x"])
    basis = groebner_basis([ring.parse("x^2 - 1"), ring.parse("x^3 - 1")], ring)
    oracle = poly_gcd_univariate(
        [Fraction(-1), Fraction(0), Fraction(1)],
        [Fraction(-1), Fraction(0), Fraction(0), Fraction(1)],
    )
    assert oracle == [Fraction(-1), Fraction(1)]  # x - 1
    assert len(basis) == 1
    assert basis[0] == ring.parse("x - 1")


def test_empty_generating_set():
    ring = PolyRing(QQ, ["x", "y"])
    assert groebner_basis([], ring) == []


def test_twisted_cubic_elimination():
    ring = PolyRing(QQ, ["x", "y", "z"], order=LEX)
    basis = groebner_basis([ring.parse("y - x^2"), ring.parse("z - x^3")], ring)
    # oracle: xz - y^2 vanishes on the parametrization (x, x^2, x^3)
    rel = ring.parse("x*z - y^2")
    r1 = PolyRing(QQ, ["x"])
    x = r1.var("x")
    assert rel.substitute([x, x * x, x * x * x]).is_zero
    assert normal_form(rel, basis, ring).is_zero


def test_normal_form_examples():
    ring = PolyRing(QQ, ["x"])
    basis = groebner_basis([ring.parse("x - 1")], ring)
    assert normal_form(ring.parse("x^2"), basis, ring) == ring.one
    assert normal_form(ring.zero, basis, ring).is_zero
    # substitution order: y dominates, so y - x^2 rewrites y into x^2
    ryx = PolyRing(QQ, ["y", "x"], order=LEX)
    basis2 = groebner_basis([ryx.parse("y - x^2")], ryx)
    assert normal_form(ryx.parse("x*y"), basis2, ryx) == ryx.parse("x^3")


def brute_force_syzygy_dim(mat, degree):
    """Dimension of {v : mat . v = 0, deg(entries) <= degree} over k.

    Enumerates coefficient unknowns for each entry and solves the
    resulting exact linear system; independent of the Buchberger route.
    """
    ring = mat.ring
    monos = []
    for d in range(degree + 1):
        monos.extend(ring.monomials_of_degree(d))
    unknowns = [(j, m) for j in range(mat.ncols) for m in monos]
    # rows: for each ambient row i and each monomial of the product
    equations = {}
    for col, (j, m) in enumerate(unknowns):
        for i in range(mat.nrows):
            entry = mat.rows[i][j]
            for em, ec in entry.terms.items():
                key = (i, mono_mul(em, m))
                equations.setdefault(key, {})[col] = equations.setdefault(
                    key, {}
                ).get(col, ring.field.zero) + ec
    rows = []
    for key in sorted(equations):
        row = [equations[key].get(c, ring.field.zero) for c in range(len(unknowns))]
        rows.append(row)
    if not rows:
        return len(unknowns)
    return len(unknowns) - linalg.rank(rows, ring.field)


def computed_syzygy_span_dim(mat, syz, degree):
    """Dimension of the degree-bounded span of the computed syzygies."""
    ring = mat.ring
    monos = []
    for d in range(degree + 1):
        monos.extend(ring.monomials_of_degree(d))
    unknowns = {(j, m): idx for idx, (j, m) in enumerate(
        (j, m) for j in range(mat.ncols) for m in monos
    )}
    vectors = []
    for col in range(syz.ncols):
        col_deg = max(
            (syz.rows[i][col].total_degree() for i in range(syz.nrows)), default=0
        )
        for m in monos:
            if sum(m) + max(col_deg, 0) > degree:
                continue
            vec = [ring.field.zero] * len(unknowns)
            fits = True
            for i in range(syz.nrows):
                for em, ec in syz.rows[i][col].terms.items():
                    key = (i, mono_mul(em, m))
                    if key not in unknowns:
                        fits = False
                        break
                    vec[unknowns[key]] = ring.field.add(vec[unknowns[key]], ec)
                if not fits:
                    break
            if fits and any(x != ring.field.zero for x in vec):
                vectors.append(vec)
    if not vectors:
        return 0
    return linalg.rank(vectors, ring.field)


@pytest.mark.parametrize("seed", range(4))
def test_syzygy_soundness_and_completeness(seed):
    rng = random.Random(seed)
    ring = PolyRing(QQ, ["x", "y"])
    mat = Mat(
        ring,
        [
            [ring.random_poly(rng, max_degree=2, nterms=2) for _ in range(3)]
            for _ in range(2)
        ],
        ncols=3,
    )
    syz = syzygy_matrix(mat)
    assert (mat * syz).is_zero
    degree = 3
    expected = brute_force_syzygy_dim(mat, degree)
    got = computed_syzygy_span_dim(mat, syz, degree)
    assert got == expected


def test_syzygies_examples():
    ring = PolyRing(QQ, ["x", "y"])
    pres = syzygies([ring.var("x"), ring.var("y")], ring)
    assert pres.ambient_rank == 2
    assert pres.relations.ncols == 1
    col = pres.relations.column(0)
    # the relation is (y, -x) up to sign and scaling
    assert col[0] * ring.var("x") + col[1] * ring.var("y") == ring.zero

    r1 = PolyRing(QQ, ["x"])
    single = syzygies([r1.var("x")], r1)
    assert single.relations.ncols == 0

    dup = syzygies([ring.var("x"), ring.var("x")], ring)
    cols = [dup.relations.column(j) for j in range(dup.relations.ncols)]
    assert any(
        c[0].constant_value() is not None and c[0] == -c[1] for c in cols
    )


def test_buchberger_criterion_on_outputs():
    """All S-pair remainders of a returned basis reduce to zero."""
    rng = random.Random(11)
    for ring in (PolyRing(QQ, ["x", "y"]), PolyRing(GF(5), ["x", "y", "z"])):
        gens = [ring.random_poly(rng, max_degree=2, nterms=3) for _ in range(3)]
        basis = groebner_basis(gens, ring)
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                a, b = basis[i], basis[j]
                if a.is_zero or b.is_zero:
                    continue
                ma, mb = a.leading_monomial(), b.leading_monomial()
                lcm = tuple(max(x, y) for x, y in zip(ma, mb))
                sa = ring.monomial(tuple(l - m for l, m in zip(lcm, ma)))
                sb = ring.monomial(tuple(l - m for l, m in zip(lcm, mb)))
                spair = sa * a.scale(ring.field.inv(a.leading_coeff())) - sb * b.scale(
                    ring.field.inv(b.leading_coeff())
                )
                assert normal_form(spair, basis, ring).is_zero


def test_determinism():
    rng = random.Random(3)
    ring = PolyRing(QQ, ["x", "y"])
    gens = [ring.random_poly(rng, max_degree=3, nterms=3) for _ in range(3)]
    b1 = groebner_basis(gens, ring)
    b2 = groebner_basis(list(reversed(gens)), ring)
    assert b1 == b2


def test_quotient_ring_canonical_forms():
    ring = PolyRing(QQ, ["x", "y"], quotient=["x*y"])
    assert ring.parse("x*y + x") == ring.parse("x")
    assert (ring.var("x") * ring.var("y")).is_zero
    # syzygies over the quotient see the annihilator
    mat = Mat(ring, [["x"]], ncols=1)
    syz = syzygy_matrix(mat)
    products = [(mat * syz).rows[0][j] for j in range(syz.ncols)]
    assert all(p.is_zero for p in products)
    assert any(
        not syz.rows[0][j].is_zero for j in range(syz.ncols)
    )  # y annihilates x


def test_evaluate_examples_and_errors():
    ring = PolyRing(QQ, ["x", "y"])
    mat = Mat(ring, [["x", "y"]], ncols=2)
    assert evaluate_matrix(mat, RationalPoint(ring, (0, 0))) == [
        [Fraction(0), Fraction(0)]
    ]
    r1 = PolyRing(QQ, ["x"])
    assert evaluate_matrix(Mat(r1, [["x - 1"]], ncols=1), RationalPoint(r1, (1,))) == [
        [Fraction(0)]
    ]
    m2 = Mat(ring, [["x", "y"], ["y", "x"]], ncols=2)
    rows = evaluate_matrix(m2, RationalPoint(ring, (1, 2)))
    assert rows == [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]]
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    assert det == -3
    quotient = PolyRing(QQ, ["x", "y"], quotient=["x*y - 1"])
    with pytest.raises(ValueError, match="vanishing locus"):
        RationalPoint(quotient, (0, 0))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_evaluate_is_multiplicative(seed):
    rng = random.Random(seed)
    ring = PolyRing(QQ, ["x", "y"])
    a = Mat(ring, [[ring.random_poly(rng, 2, 2) for _ in range(2)] for _ in range(2)], ncols=2)
    b = Mat(ring, [[ring.random_poly(rng, 2, 2) for _ in range(2)] for _ in range(2)], ncols=2)
    point = RationalPoint(ring, (QQ.random(rng), QQ.random(rng)))
    left = evaluate_matrix(a * b, point)
    ea, eb = evaluate_matrix(a, point), evaluate_matrix(b, point)
    right = [
        [sum(ea[i][k] * eb[k][j] for k in range(2)) for j in range(2)]
        for i in range(2)
    ]
    assert left == right


def test_mono_helpers():
    assert mono_mul((1, 2), (0, 3)) == (1, 5)
    assert mono_divides((1, 0), (2, 1))
    assert not mono_divides((3, 0), (2, 1))
