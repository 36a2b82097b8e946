"""Closed-form upper bounds as exact radicals.

A bound is stored as ``radicand ** (1 / root)`` with a rational radicand, so
``count <= bound`` is decided by ``count ** root <= radicand`` in integers.
Floats only appear in ``approx`` for display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction

import gmpy2


class BadExponent(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    name: str
    radicand: Fraction
    root: int
    applicable: bool = True
    violated: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "radicand", Fraction(self.radicand))
        if self.root < 1 or self.radicand < 0:
            raise ValueError("need root >= 1 and a nonnegative radicand")

    def admits(self, count: int) -> bool:
        """True when count <= bound, decided exactly."""
        if count < 0:
            return True
        r = self.radicand
        return count**self.root * r.denominator <= r.numerator

    def floor(self) -> int:
        r = self.radicand
        return int(gmpy2.iroot(gmpy2.mpz(r.numerator // r.denominator), self.root)[0])

    @property
    def approx(self) -> float:
        r = self.radicand
        if r == 0:
            return 0.0
        return math.exp((math.log(r.numerator) - math.log(r.denominator)) / self.root)


def _flags(checks: dict[str, bool]) -> tuple[bool, tuple[str, ...]]:
    bad = tuple(name for name, ok in checks.items() if not ok)
    return not bad, bad


def _positive(**kw) -> None:
    for k, v in kw.items():
        if v < 1:
            raise ValueError(f"{k} must be at least 1")


def _th1_range(m: int, n: int, t: int, p: int | None) -> dict[str, bool]:
    # 100 (mn)^(3/2) < t  and  t < p^(3/4) / 3
    checks = {"100(mn)^(3/2) < t": 10**4 * (m * n) ** 3 < t * t}
    if p is not None:
        checks["t < p^(3/4)/3"] = 81 * t**4 < p**3
    return checks


def bound_th1(m: int, n: int, t: int, p: int | None = None) -> BoundReport:
    """16 m n^2 (m + n) t^(2/3) for one coset pair."""
    _positive(m=m, n=n, t=t)
    ok, bad = _flags(_th1_range(m, n, t, p))
    return BoundReport("th1", Fraction((16 * m * n * n * (m + n)) ** 3 * t * t), 3, ok, bad)


def bound_thsr(n: int, h: int, t: int, p: int | None = None) -> BoundReport:
    """32 h^(3/4) n^5 t^(2/3) for h equations in distinct cosets."""
    _positive(n=n, h=h, t=t)
    checks = {
        "h < t^(4/3)/81": (81 * h) ** 3 < t**4,
        "t > 8h^(3/2)": t * t > 64 * h**3,
    }
    if p is not None:
        checks["h < p t^(-4/3)/3"] = (3 * h) ** 3 * t**4 < p**3
    ok, bad = _flags(checks)
    return BoundReport("thsr", Fraction(32**12 * h**9 * n**60 * t**8), 12, ok, bad)


def log_upper(t: int, digits: int = 30) -> Fraction:
    """A rational r with ln t <= r < ln t (1 + 1e-20), for t >= 2; 0 for t = 1."""
    if t <= 1:
        return Fraction(0)
    with localcontext() as ctx:
        ctx.prec = digits + 5
        v = Decimal(t).ln()
        ulp = Decimal(1).scaleb(v.adjusted() - digits)
        v = v.quantize(ulp, rounding=ROUND_CEILING) + ulp
    return Fraction(v)


def bound_energy(n: int, q: int, t: int, p: int | None = None) -> BoundReport:
    """Bound on the q-th polynomial energy over G x G (m = n)."""
    if q < 2:
        raise BadExponent(f"q={q}: the energy bound needs q >= 2")
    _positive(n=n, t=t)
    checks = {"100 n^3 < t": 10**4 * n**6 < t * t}
    if p is not None:
        checks["t < (p/3)^(12/17)"] = 3**12 * t**17 < p**12
    ok, bad = _flags(checks)
    notes: tuple[str, ...] = ()
    if q <= 3:
        # C1 = 3^q 2^(17q/4 - 3) n^(6q-4) / (4-q), times t^((7q+16)/12)
        base = Fraction(3**q * n ** (6 * q - 4), 4 - q)
        rad = base**12 * Fraction(2) ** (51 * q - 36) * t ** (7 * q + 16)
        return BoundReport(f"energy_q{q}", rad, 12, ok, bad)
    if q == 4:
        c3 = 3**3 * 2**12 * n**20
        rad = Fraction(c3) ** 3 * t**11 * log_upper(t) ** 3
        notes = ("q=4 substituted in C3 and the exponent; ln t replaced by a rational upper bound",)
        return BoundReport("energy_q4", rad, 3, ok, bad, notes)
    c2 = Fraction(3**q * 2 ** (3 * q + 2) * n ** (5 * q), q - 4)
    return BoundReport(f"energy_q{q}", c2**3 * t ** (3 + 2 * q), 3, ok, bad)


def bound_corollaries(m: int, n: int, t: int, p: int | None = None) -> tuple[BoundReport, BoundReport]:
    """(polynomial energy bound 17 m n^2 (m+n) t^(8/3), composed energy bound 16 m n^2 (m+n) t^(8/3))."""
    _positive(m=m, n=n, t=t)
    ok, bad = _flags(_th1_range(m, n, t, p))
    w = m * n * n * (m + n)
    return (
        BoundReport("energy_17", Fraction((17 * w) ** 3 * t**8), 3, ok, bad),
        BoundReport("energy_16", Fraction((16 * w) ** 3 * t**8), 3, ok, bad),
    )


def bound_comparators(m: int, n: int, t: int, p: int, chi: int | None = None,
                      linear_case: bool = False) -> tuple[BoundReport, BoundReport | None]:
    """Earlier bounds for comparison: 4 t^(2/3) for x - y + mu, and the Euler-characteristic bound.

    The second report is None when chi is not supplied.
    """
    _positive(m=m, n=n, t=t)
    q = p - 1
    hk_ok, hk_bad = _flags({
        "linear equation": linear_case,
        "t < (p-1)/((p-1)^(1/4)+1)": q - t > 0 and t**4 * q < (q - t) ** 4,
    })
    hk = BoundReport("hk", Fraction(64 * t * t), 3, hk_ok, hk_bad)
    if chi is None:
        return hk, None
    if chi < 0:
        raise ValueError("chi must be nonnegative")
    first = Fraction(54 * m * n * chi * t * t)
    second = Fraction(12 * m * n, p) ** 3 * t * t
    cz = BoundReport("cz", max(first, second), 3, True, (), ("chi and curve hypotheses are user-asserted",))
    return hk, cz
