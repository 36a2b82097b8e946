import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _strategies import bipolys, fields, unipolys
from cosetbounds.ffield import FieldCtx, subgroup_of_order
from cosetbounds.polyalg import (BadShape, BiPoly, CommonFactor, NegativeExponent, PolySyntaxError, UniPoly,
                                 ZeroPolynomial, divides, format_poly, parse_poly, partial, pseudo_remainder,
                                 resultant_y, singular_points, uni_gcd, uni_roots)

F7 = FieldCtx(7)
SMALL_PRIMES = [p for p in range(3, 102) if all(p % d for d in range(2, p))]


def P7(s):
    return parse_poly(s, F7)


# ------------------------------------------------------------------ parsing

def test_parse_examples():
    assert P7("x - y + 1").terms == {(1, 0): 1, (0, 1): 6, (0, 0): 1}
    assert P7("x^2*y + 5").terms == {(2, 1): 1, (0, 0): 5}


@pytest.mark.parametrize("text,offset", [("x +", 3), ("3x", 1), ("(x + y", 6), ("x ^ y", 4), ("", 0), ("é + x", 0)])
def test_parse_errors_carry_byte_offset(text, offset):
    with pytest.raises(PolySyntaxError) as err:
        P7(text)
    assert err.value.offset == offset


def test_negative_exponent():
    with pytest.raises(NegativeExponent):
        P7("x^-1")


def test_parse_nested_and_negative_literals():
    assert P7("-(x - 2)^2 * -3") == P7("3*x^2 + 2*x + 5")
    assert P7(" ( x ) * ( y ) ") == P7("x*y")
    assert str(P7("0")) == "0"


def test_canonical_print_is_graded_lex():
    assert format_poly(P7("1 + y + x + x*y + y^3 + x^2")) == "y^3 + x^2 + x*y + x + y + 1"


@given(st.data())
def test_parse_print_roundtrip(data):
    ctx = data.draw(fields())
    P = data.draw(bipolys(ctx, 4, 4))
    assert parse_poly(str(P), ctx) == P


# -------------------------------------------------------------- arithmetic

@given(st.data())
def test_ring_axioms_by_evaluation(data):
    ctx = data.draw(fields())
    A, B, C = (data.draw(bipolys(ctx)) for _ in range(3))
    pts = data.draw(st.lists(st.tuples(st.integers(0, ctx.p - 1), st.integers(0, ctx.p - 1)), min_size=3, max_size=6))
    p = ctx.p
    for x, y in pts:
        assert (A * (B + C))(x, y) == (A(x, y) * (B(x, y) + C(x, y))) % p
        assert (A - B)(x, y) == (A(x, y) - B(x, y)) % p
    assert A * B == B * A
    assert (A + B) - B == A


@given(st.data())
def test_eval_grid_matches_pointwise(data):
    ctx = data.draw(fields((101, 10007)))
    P = data.draw(bipolys(ctx))
    xs = data.draw(st.lists(st.integers(0, ctx.p - 1), min_size=1, max_size=5))
    ys = data.draw(st.lists(st.integers(0, ctx.p - 1), min_size=1, max_size=5))
    grid = P.eval_grid(xs, ys)
    assert grid.tolist() == [[P(x, y) for y in ys] for x in xs]


def test_partial_examples():
    assert partial(P7("y - x + 1"), "y") == P7("1")
    assert partial(P7("x^3*y^2"), "x") == P7("3*x^2*y^2")
    assert partial(P7("x^7"), "x").is_zero()


@given(st.data())
def test_partial_is_a_derivation(data):
    ctx = data.draw(fields())
    A, B = data.draw(bipolys(ctx)), data.draw(bipolys(ctx))
    for v in "xy":
        assert partial(A * B, v) == partial(A, v) * B + A * partial(B, v)


# ---------------------------------------------------------------- division

def test_divides_examples():
    assert divides(P7("y - x"), P7("y^2 - x^2"))
    assert not divides(P7("y - x"), P7("y^2 - x"))
    assert pseudo_remainder(P7("y^2 - x"), P7("y - x")) == P7("x^2 - x")
    with pytest.raises(BadShape):
        divides(P7("x + 1"), P7("y"))


@given(st.data())
def test_divides_constructed_multiples(data):
    ctx = data.draw(fields((11, 101, 10007)))
    P = data.draw(bipolys(ctx, 2, 2))
    S = data.draw(bipolys(ctx, 2, 2))
    c = data.draw(st.integers(1, ctx.p - 1))
    if P.deg_y < 1:
        return
    assert divides(P, P * S)
    assert not divides(P, P * S + c)


def test_lemma_nondivisibility_product_of_conjugates():
    # Q(x, y^t) = prod_{g in G} P(x, g y) is a polynomial in y^t, and Q(x,0) is divisible by P(x,0)^(t // n)
    ctx = FieldCtx(13)
    rng = np.random.default_rng(7)
    for t in (2, 3, 4, 6):
        G = subgroup_of_order(ctx, t)
        for _ in range(5):
            P = BiPoly(ctx, rng.integers(0, 13, size=(2, 3)))
            if P.deg_y < 1 or P.at_y(0).is_zero():
                continue
            prod = BiPoly.const(ctx, 1)
            for g in G.elements:
                scaled = {(i, j): c * pow(g, j, 13) for (i, j), c in P.terms.items()}
                prod = prod * BiPoly.from_terms(ctx, scaled)
            assert all(j % t == 0 for (_, j) in prod.terms)
            assert divides(P, prod) or P.deg_y == 0
            Q0 = prod.at_y(0)
            base = P.at_y(0)
            power = UniPoly(ctx, [1])
            for _ in range(t // P.deg_y):
                power = power * base
            assert (Q0 % power).is_zero()


# ------------------------------------------------------------------- roots

def test_uni_roots_examples():
    f = UniPoly.from_roots(F7, [2, 3]) * UniPoly(F7, [1, 0, 1])
    assert uni_roots(f) == [2, 3]
    assert uni_roots(UniPoly(F7, [-1, 0, 1])) == [1, 6]
    assert uni_roots(UniPoly(F7, [5])) == []
    with pytest.raises(ZeroPolynomial):
        uni_roots(UniPoly(F7, []))


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_uni_roots_match_scan_small_fields(p):
    ctx = FieldCtx(p)
    rng = np.random.default_rng(p)
    for _ in range(40):
        f = UniPoly(ctx, rng.integers(0, p, size=int(rng.integers(1, 7))))
        if f.is_zero():
            continue
        scan = [x for x in range(p) if f(x) == 0]
        assert uni_roots(f) == scan
        assert uni_roots(f, exhaustive_below=0) == scan


@given(st.sampled_from([10007, 1003001, 2**31 - 1]), st.lists(st.integers(0, 2**31), min_size=1, max_size=8),
       st.integers(0, 5), st.integers(0, 2**32))
def test_uni_roots_recovers_planted_roots(p, roots, extra, seed):
    ctx = FieldCtx(p)
    roots = sorted({r % p for r in roots})
    # times an irreducible-free cofactor check: roots of the product are the planted ones plus cofactor roots
    cof = UniPoly(ctx, [1] + [0] * extra + [1])
    f = UniPoly.from_roots(ctx, roots) * cof
    found = uni_roots(f, seed)
    assert set(roots) <= set(found)
    assert all(f(r) == 0 for r in found)
    assert set(found) - set(roots) == set(uni_roots(cof, seed))


def test_gcd_is_monic_common_divisor():
    a = UniPoly.from_roots(F7, [1, 2, 3])
    b = UniPoly.from_roots(F7, [2, 3, 5]) * 4
    assert uni_gcd(a, b) == UniPoly.from_roots(F7, [2, 3])


# --------------------------------------------------------------- resultant

def test_resultant_examples():
    assert resultant_y(P7("y - x"), P7("y - 2*x")) == UniPoly(F7, [0, 6])
    assert resultant_y(P7("y - x"), P7("y - x")).is_zero()
    r = resultant_y(P7("y^2 - x^3"), partial(P7("y^2 - x^3"), "y"))
    assert set(uni_roots(r)) <= {0}


@given(st.data())
def test_common_root_forces_resultant_zero(data):
    ctx = data.draw(fields((11, 13, 31)))
    P = data.draw(bipolys(ctx, 2, 2))
    Q = data.draw(bipolys(ctx, 2, 2))
    if P.deg_y < 1 or Q.deg_y < 1:
        return
    R = resultant_y(P, Q)
    for x0 in range(ctx.p):
        f, g = P.at_x(x0), Q.at_x(x0)
        if f.is_zero() or g.is_zero():
            continue
        if set(uni_roots(f)) & set(uni_roots(g)):
            assert R(x0) == 0


def test_singular_points_examples():
    assert singular_points(P7("y - x^2")) == set()
    assert singular_points(P7("y^2 - x^3")) == {(0, 0)}
    with pytest.raises(CommonFactor):
        singular_points(P7("(y - x)^2"))


@given(st.data())
def test_singular_points_are_singular_and_few(data):
    ctx = data.draw(fields((11, 13, 31)))
    P = data.draw(bipolys(ctx, 3, 3))
    if P.deg_y < 1:
        return
    try:
        pts = singular_points(P)
    except CommonFactor:
        return
    Py = partial(P, "y")
    m, n = P.bidegree
    assert all(P(x, y) == 0 and Py(x, y) == 0 for x, y in pts)
    brute = {(x, y) for x in range(ctx.p) for y in range(ctx.p) if P(x, y) == 0 and Py(x, y) == 0}
    assert pts == brute
    assert len(pts) <= (m + n) * (m + n - 1)
