import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cosetbounds.bounds import (BadExponent, BoundReport, bound_comparators, bound_corollaries, bound_energy,
                                bound_th1, bound_thsr, log_upper)


def decimal_admits(count, report, dps=50):
    with mpmath.workdps(dps):
        r = report.radicand
        value = mpmath.root(mpmath.mpf(r.numerator) / r.denominator, report.root)
        if abs(value - count) <= mpmath.mpf(10) ** (5 - dps) * max(1, count):
            return True  # exact ties land here
        return count <= value


def test_th1_examples():
    b = bound_th1(1, 1, 1000)
    assert b.floor() == 3200 and b.admits(3200) and not b.admits(3201)
    assert bound_th1(1, 1, 1).floor() == 32
    assert bound_th1(1, 1, 1).admits(32)
    assert not bound_th1(1, 1, 100).applicable
    assert bound_th1(1, 1, 101).applicable
    assert bound_th1(1, 1, 1000, p=1003001).applicable
    assert not bound_th1(1, 1, 1000, p=2003).applicable  # 81 t^4 >= p^3


def test_thsr_examples():
    assert bound_thsr(1, 1, 1000).floor() == 3200
    assert bound_thsr(1, 16, 10**6).floor() == 2_560_000
    capped = bound_thsr(1, 10**6, 1000)
    assert not capped.applicable and "h < t^(4/3)/81" in capped.violated
    assert not bound_thsr(1, 1, 10**6, p=10**6 + 3).applicable


def test_energy_constants():
    t = 12345
    q2 = bound_energy(1, 2, t)
    # C1(1,2) = 9 * 2^(11/2) / 2 and exponent 30/12
    assert q2.root == 12 and q2.radicand == Fraction(9, 2) ** 12 * 2**66 * t**30
    q5 = bound_energy(2, 5, t)
    c2 = Fraction(3**5 * 2**17 * 2**25, 1)
    assert q5.root == 3 and q5.radicand == c2**3 * t ** (3 + 10)
    q4 = bound_energy(1, 4, t)
    assert q4.notes and q4.radicand >= Fraction(27 * 2**12) ** 3 * t**11 * Fraction(math.log(t) * (1 - 1e-12)) ** 3
    with pytest.raises(BadExponent):
        bound_energy(1, 1, t)


def test_energy_applicability():
    assert bound_energy(1, 2, 1000, p=10**9 + 7).applicable
    small_p = bound_energy(1, 2, 1000, p=10**4 + 7)
    assert not small_p.applicable and "t < (p/3)^(12/17)" in small_p.violated
    assert not bound_energy(1, 2, 99).applicable


@given(st.integers(2, 10**12))
def test_log_upper_is_tight_upper_bound(t):
    with mpmath.workdps(60):
        exact = mpmath.log(t)
        up = log_upper(t)
        v = mpmath.mpf(up.numerator) / up.denominator
        assert v >= exact and (v - exact) / exact < mpmath.mpf("1e-6")
    assert log_upper(1) == 0


def test_corollaries():
    a, b = bound_corollaries(1, 1, 1000)
    assert a.radicand == Fraction(34**3 * 1000**8) and b.radicand == Fraction(32**3 * 1000**8)
    assert a.radicand / b.radicand == Fraction(17, 16) ** 3


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 10**6))
def test_corollary_ratio_everywhere(m, n, t):
    a, b = bound_corollaries(m, n, t)
    assert a.radicand == b.radicand * Fraction(17, 16) ** 3


def test_comparators():
    hk, cz = bound_comparators(1, 1, 1000, 1003001, chi=None, linear_case=True)
    assert hk.floor() == 400 and hk.applicable and cz is None
    hk, _ = bound_comparators(1, 1, 1000, 1003001, linear_case=False)
    assert not hk.applicable
    _, cz = bound_comparators(2, 3, 1000, 2**31 - 1, chi=4)
    assert cz.radicand == 54 * 2 * 3 * 4 * 1000**2
    _, cz0 = bound_comparators(2, 3, 1000, 1009, chi=0)
    assert cz0.radicand == Fraction(12 * 6, 1009) ** 3 * 1000**2


def test_comparator_hypothesis_threshold():
    # t < (p-1)/((p-1)^(1/4)+1): p-1 = 10000 gives 10000/11 = 909.09...
    p = 10001
    assert bound_comparators(1, 1, 909, p, linear_case=True)[0].applicable
    assert not bound_comparators(1, 1, 910, p, linear_case=True)[0].applicable


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 10**7), st.sampled_from(["m", "n", "t"]))
def test_th1_monotone(m, n, t, which):
    step = {"m": (m + 1, n, t), "n": (m, n + 1, t), "t": (m, n, t + 1)}[which]
    assert bound_th1(*step).radicand >= bound_th1(m, n, t).radicand


@given(st.integers(1, 4), st.integers(2, 9), st.integers(1, 10**5), st.integers(-3, 3))
def test_power_comparison_matches_decimal(n, q, t, delta):
    rep = bound_energy(n, q, t)
    assume(rep.floor() < 10**35)  # 50 digits cannot separate counts much longer than this
    count = max(0, rep.floor() + delta)
    assert rep.admits(count) == decimal_admits(count, rep)


def test_report_validation():
    with pytest.raises(ValueError):
        BoundReport("x", Fraction(-1), 3)
    assert BoundReport("x", Fraction(8), 3).floor() == 2
    assert BoundReport("x", Fraction(7, 1), 3).floor() == 1
    assert BoundReport("x", Fraction(0), 2).approx == 0.0
