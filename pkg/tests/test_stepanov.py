import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosetbounds.counting import SolutionSet, count_solutions
from cosetbounds.ffield import Coset, FieldCtx, next_prime_1_mod, subgroup_of_order
from cosetbounds.polyalg import BiPoly, parse_poly, partial, uni_roots
from cosetbounds.stepanov import (OrderTooLarge, ParamsInfeasible, PrecondViolated, StepanovCertificate,
                                  StepanovParams, build_system, certificate_from_text, choose_params, column_order,
                                  construct_certificate, construct_family_certificate, curve_jet, derivative_pair,
                                  operator_factor, operator_factors, system_rows, verify_certificate)


def taylor(f_coeffs, x0, order, p):
    """Taylor coefficients of f at x0, by binomial expansion."""
    out = []
    for k in range(order):
        out.append(sum(c * math.comb(i, k) * pow(x0, i - k, p) for i, c in enumerate(f_coeffs) if i >= k) % p)
    return out


def curve_points(P, limit=8):
    pts = []
    for x0 in range(1, P.p):
        f = P.at_x(x0)
        if f.is_zero():
            continue
        for y0 in uni_roots(f):
            if y0 and partial(P, "y")(x0, y0):
                pts.append((x0, y0))
        if len(pts) >= limit:
            break
    return pts[:limit]


# ------------------------------------------------------ derivative pairs

def test_derivative_pair_examples():
    ctx = FieldCtx(101)
    P = parse_poly("x^2*y + 3*y^2 + x + 4", ctx)
    d1 = derivative_pair(P, 1)
    assert d1.q == -partial(P, "x") and d1.r == partial(P, "y")
    d2 = derivative_pair(parse_poly("y - x^3", ctx), 2)
    assert d2.q == parse_poly("6*x", ctx) and d2.r == parse_poly("1", ctx)
    with pytest.raises(OrderTooLarge):
        derivative_pair(parse_poly("y - x", FieldCtx(7)), 7)


@pytest.mark.parametrize("p", [101, 10007])
def test_graph_curve_oracle(p):
    ctx = FieldCtx(p)
    rng = np.random.default_rng(p)
    for _ in range(10):
        f = [int(v) for v in rng.integers(0, p, size=int(rng.integers(1, 8)))]
        P = BiPoly.from_terms(ctx, {(0, 1): 1, **{(i, 0): -c for i, c in enumerate(f)}})
        for k in range(1, 11):
            d = derivative_pair(P, k)
            # f^(k)(x) as a polynomial: coefficient of x^(i-k) is c_i * i!/(i-k)!
            fk = BiPoly.from_terms(ctx, {(i - k, 0): c * math.perm(i, k) for i, c in enumerate(f) if i >= k})
            assert d.q == fk and d.r == BiPoly.const(ctx, 1)


def test_derivative_and_operator_degree_bounds():
    # the acceptance run repeats this on 100 polynomials
    ctx = FieldCtx(10007)
    rng = np.random.default_rng(2024)
    for _ in range(25):
        m, n = (int(v) for v in rng.integers(1, 5, size=2))
        P = BiPoly(ctx, rng.integers(0, ctx.p, size=(m + 1, n + 1)))
        m, n = P.bidegree
        if n < 1:
            continue
        r1sq = partial(P, "y") ** 2
        r = partial(P, "y")
        for k in range(1, 21):
            d = derivative_pair(P, k)
            if not d.q.is_zero():
                assert d.q.deg_x <= (2 * k - 1) * m - k and d.q.deg_y <= (2 * k - 1) * n - k + 1
            assert d.r == r
            assert d.r.deg_x <= (2 * k - 1) * m and d.r.deg_y <= (2 * k - 1) * (n - 1)
            r = r * r1sq
        a, b, c, t = (int(v) for v in rng.integers(1, 50, size=4))
        for k, R in enumerate(operator_factors(P, t, 20, a, b, c)):
            assert R.is_zero() or (R.deg_x <= 4 * k * m and R.deg_y <= 4 * k * n)


# -------------------------------------------------------------- operators

def test_operator_factor_small_orders():
    ctx = FieldCtx(101)
    P = parse_poly("x^2*y + 3*x*y^2 + y + 5*x + 7", ctx)
    a, b, c, t = 2, 3, 1, 10
    assert operator_factor(P, t, 0, a, b, c) == BiPoly.const(ctx, 1)
    X, Y = BiPoly.x(ctx), BiPoly.y(ctx)
    q1, r1 = -partial(P, "x"), partial(P, "y")
    assert operator_factor(P, t, 1, a, b, c) == Y * r1 * (a + b * t) + X * q1 * (c * t)


@settings(max_examples=25)
@given(st.sampled_from([101, 10007]), st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_operator_identity_on_the_curve(p, seed, kmax):
    # R_k * M = P_y^(2k-1) x^k y^k d^k/dx^k M along the curve, with M = x^alpha y^beta
    ctx = FieldCtx(p)
    rng = np.random.default_rng(seed)
    m, n = (int(v) for v in rng.integers(1, 4, size=2))
    P = BiPoly(ctx, rng.integers(0, p, size=(m + 1, n + 1)))
    if P.deg_y < 1:
        return
    alpha, beta = (int(v) for v in rng.integers(0, 40, size=2))
    for x0, y0 in curve_points(P, 3):
        jet = curve_jet(P, x0, y0, kmax + 1)
        X = [x0, 1] + [0] * (kmax - 1)
        M = [1] + [0] * kmax
        for _ in range(alpha):
            M = [sum(M[i] * X[j - i] for i in range(j + 1)) % p for j in range(kmax + 1)]
        for _ in range(beta):
            M = [sum(M[i] * jet[j - i] for i in range(j + 1)) % p for j in range(kmax + 1)]
        r1 = partial(P, "y")(x0, y0)
        for k in range(1, kmax + 1):
            R = operator_factor(P, 1, k, alpha, 0, beta)
            lhs = R(x0, y0) * pow(x0, alpha, p) * pow(y0, beta, p) % p
            rhs = pow(r1, 2 * k - 1, p) * pow(x0 * y0, k, p) * math.factorial(k) * M[k] % p
            assert lhs == rhs


def test_curve_jet_matches_graph_taylor():
    p = 10007
    ctx = FieldCtx(p)
    f = [3, 1, 4, 1, 5, 9]
    P = BiPoly.from_terms(ctx, {(0, 1): 1, **{(i, 0): -c for i, c in enumerate(f)}})
    for x0 in (1, 17, 5000):
        y0 = sum(c * pow(x0, i, p) for i, c in enumerate(f)) % p
        assert curve_jet(P, x0, y0, 8) == taylor(f, x0, 8, p)


# ------------------------------------------------------------- parameters

def test_choose_params_examples():
    assert choose_params(1, 1, 1000) == StepanovParams(1000, 1, 1, 1, 100, 10, 10, 25)
    assert choose_params(2, 2, 10**6, 16) == StepanovParams(10**6, 2, 2, 16, 2500, 200, 200, 78)
    assert choose_params(1, 1, 8).D == 1
    with pytest.raises(ParamsInfeasible, match="D=0"):
        choose_params(1, 1, 7)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(2, 3 * 10**5), st.sampled_from([1, 16, 81]))
def test_accepted_params_give_more_unknowns_than_rows(m, n, t, h):
    if h > 1:
        m = n
    try:
        params = choose_params(m, n, t, h)
    except ParamsInfeasible:
        return
    assert n * params.A * params.B <= t
    assert system_rows(params, h) < params.unknowns


def test_flagship_system_size():
    params = choose_params(1, 1, 1000)
    assert system_rows(params) == 100 + sum(8 * k + 101 for k in range(1, 25)) == 4924
    assert params.unknowns == 10000


def test_single_order_system_is_coefficient_vanishing():
    p = 101
    ctx = FieldCtx(p)
    P = parse_poly("x - y + 3", ctx)
    params = StepanovParams(t=10, m=1, n=1, h=1, A=3, B=2, C=2, D=1)
    g1, g2 = 5, 7
    M = build_system(P, params, [(g1, g2)]).entries
    cols = column_order(params)
    want = np.zeros((3, len(cols)), dtype=np.int64)
    for j, (a, b, c) in enumerate(cols.tolist()):
        want[a, j] = pow(g1, b, p) * pow(g2, c, p) % p
    assert np.array_equal(M, want)


# ----------------------------------------------------------- certificates

@pytest.fixture(scope="module")
def small_instance():
    p = next_prime_1_mod(64, 20000)
    ctx = FieldCtx(p)
    G = subgroup_of_order(ctx, 64)
    P = parse_poly(f"x - y + {(G.gen - 1) % p}", ctx)
    c = Coset(1, G)
    return P, c, construct_certificate(P, c, c)


def test_certificate_checks_and_soundness(small_instance):
    P, c, cert = small_instance
    sols = count_solutions(P, c, c, "naive")
    assert cert.exact_count == len(sols) >= 1
    assert all(cert.checks.values()) and cert.ok
    assert cert.bound >= cert.exact_count
    assert cert.bound == cert.raw_bound + cert.correction_total
    assert verify_certificate(cert, P, c, c, sols)
    assert verify_certificate(cert, P, c, c, [])


def test_certificate_mutation_is_caught(small_instance):
    P, c, cert = small_instance
    sols = count_solutions(P, c, c)
    caught = 0
    for i in np.nonzero(cert.lam)[0][:5]:
        bad = StepanovCertificate.from_json(cert.to_json())
        bad.lam[i] = (bad.lam[i] + 1) % P.p
        caught += not verify_certificate(bad, P, c, c, sols)
    assert caught == 5


def test_certificate_roundtrip_and_determinism(small_instance):
    P, c, cert = small_instance
    text = cert.to_json()
    again = construct_certificate(P, c, c)
    assert again.to_json() == text
    back, P2, c1s, c2s = certificate_from_text(text)
    assert P2 == P and back.to_json() == text and c1s == [c]


def test_certificate_on_other_cosets_and_degrees():
    p = next_prime_1_mod(125, 5000)
    ctx = FieldCtx(p)
    G = subgroup_of_order(ctx, 125)
    for text, g1, g2 in [("x^2 + 3*x*y - y + 7", 2, 3), ("x*y^2 + x + 5*y + 1", 1, 6)]:
        P = parse_poly(text, ctx)
        c1, c2 = Coset(g1, G), Coset(g2, G)
        try:
            cert = construct_certificate(P, c1, c2)
        except ParamsInfeasible:
            continue
        sols = count_solutions(P, c1, c2, "naive")
        assert cert.ok and cert.bound >= len(sols)
        assert verify_certificate(cert, P, c1, c2, sols)


def test_certificate_preconditions():
    ctx = FieldCtx(20161)
    G = subgroup_of_order(ctx, 64)
    c = Coset(1, G)
    with pytest.raises(PrecondViolated):
        construct_certificate(parse_poly("x - y", ctx), c, c)
    with pytest.raises(PrecondViolated):
        construct_certificate(parse_poly("y + 1", ctx), c, c)
    small = subgroup_of_order(FieldCtx(29), 7)
    with pytest.raises(ParamsInfeasible, match="D=0"):
        construct_certificate(parse_poly("x - y + 3", small.ctx), Coset(1, small), Coset(1, small))


def test_family_certificate_linear_family():
    p = next_prime_1_mod(256, 40000)
    ctx = FieldCtx(p)
    sub = subgroup_of_order(ctx, 256)
    P = parse_poly("x + 3*y", ctx)
    gamma = 5
    rng = np.random.default_rng(1)
    ls = []
    while len(ls) < 2:
        l = int(rng.integers(1, p))
        if all(l * pow(o, -1, p) % p not in sub for o in ls):
            ls.append(l)
    cert = construct_family_certificate(P, gamma, ls, sub)
    assert cert.params.h == 2 and cert.matrix_shape[0] == 2 * system_rows(cert.params)
    assert cert.ok and cert.bound >= cert.exact_count


def test_family_parameters_for_quadratics_are_infeasible_at_desk_scale():
    # n A B is about n t h^(-1/4), which exceeds t for n = 2 unless h >= 16
    for t in (1000, 4096, 10**5):
        with pytest.raises(ParamsInfeasible, match="nAB"):
            choose_params(2, 2, t, 4)
