"""Prime fields, multiplicative subgroups and their cosets.

Elements are plain Python ints kept in canonical form ``0 <= x < p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

MAX_MODULUS = 2**31

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class NotPrime(ValueError):
    pass


class NotDivisor(ValueError):
    pass


class ZeroElement(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; adequate below 2**62."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def next_prime_1_mod(t: int, start: int) -> int:
    """Smallest prime p > start with p = 1 (mod t)."""
    p = start + 1
    p += (1 - p) % t
    while not is_prime(p):
        p += t
    return p


@lru_cache(maxsize=None)
def _primitive_root(p: int) -> int:
    qs = list(factorize(p - 1))
    g = 2 if p > 2 else 1
    while any(pow(g, (p - 1) // q, p) == 1 for q in qs):
        g += 1
    return g


@dataclass(frozen=True)
class FieldCtx:
    p: int

    def __post_init__(self):
        if not (2 < self.p < MAX_MODULUS) or not is_prime(self.p):
            raise NotPrime(f"{self.p} is not an odd prime below 2**31")

    def reduce(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroElement("0 has no inverse")
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    @property
    def primitive_root(self) -> int:
        """Smallest generator of the multiplicative group."""
        return _primitive_root(self.p)


@dataclass(frozen=True)
class Subgroup:
    ctx: FieldCtx
    t: int
    gen: int
    elements: tuple[int, ...] = field(repr=False)

    @property
    def p(self) -> int:
        return self.ctx.p

    def __contains__(self, x: int) -> bool:
        x %= self.ctx.p
        return x != 0 and pow(x, self.t, self.ctx.p) == 1

    def __len__(self) -> int:
        return self.t

    def __iter__(self):
        return iter(self.elements)


def subgroup_of_order(ctx: FieldCtx, t: int) -> Subgroup:
    """The unique subgroup of order ``t`` in F_p^*.

    The generator is the smallest primitive root raised to ``(p-1)/t``.
    """
    p = ctx.p
    if t < 1 or (p - 1) % t:
        raise NotDivisor(f"{t} does not divide p-1 = {p - 1}")
    gen = pow(ctx.primitive_root, (p - 1) // t, p)
    elems = [1]
    for _ in range(t - 1):
        elems.append(elems[-1] * gen % p)
    return Subgroup(ctx, t, gen, tuple(sorted(elems)))


@dataclass(frozen=True, eq=False)
class Coset:
    rep: int
    sub: Subgroup

    def __post_init__(self):
        if self.rep % self.sub.p == 0:
            raise ZeroElement("coset representative must be nonzero")
        object.__setattr__(self, "rep", self.rep % self.sub.p)

    @property
    def gamma(self) -> int:
        """rep**t; constant on the coset, so x**t == gamma for all members."""
        return pow(self.rep, self.sub.t, self.sub.p)

    def __eq__(self, other):
        if not isinstance(other, Coset):
            return NotImplemented
        return self.sub.p == other.sub.p and self.sub.t == other.sub.t and self.gamma == other.gamma

    def __hash__(self):
        return hash((self.sub.p, self.sub.t, self.gamma))

    def __contains__(self, x: int) -> bool:
        return coset_contains(self, x)

    def elements(self) -> list[int]:
        p = self.sub.p
        return sorted(self.rep * g % p for g in self.sub.elements)


def coset_contains(c: Coset, x: int) -> bool:
    p = c.sub.p
    x %= p
    if x == 0:
        raise ZeroElement("0 lies in no coset of F_p^*")
    return pow(x * pow(c.rep, -1, p) % p, c.sub.t, p) == 1


@lru_cache(maxsize=8)
def _baby_steps(p: int) -> tuple[int, dict[int, int]]:
    g = _primitive_root(p)
    m = isqrt(p - 1) + 1
    table: dict[int, int] = {}
    e = 1
    for j in range(m):
        table.setdefault(e, j)
        e = e * g % p
    return m, table


def discrete_log(ctx: FieldCtx, a: int) -> int:
    """Exponent e with primitive_root**e == a, by baby-step/giant-step."""
    p = ctx.p
    a %= p
    if a == 0:
        raise ZeroElement("log of 0")
    m, table = _baby_steps(p)
    giant = pow(ctx.primitive_root, -m, p)
    y = a
    for i in range(m + 1):
        j = table.get(y)
        if j is not None:
            return (i * m + j) % (p - 1)
        y = y * giant % p
    raise AssertionError("primitive root does not generate F_p^*")


def nth_root(ctx: FieldCtx, a: int, n: int) -> int | None:
    """Smallest mu with mu**n == a, or None when a is not an n-th power."""
    p = ctx.p
    a %= p
    if a == 0:
        raise ZeroElement("a must be nonzero")
    if n < 1:
        raise ValueError("n must be positive")
    order = p - 1
    d = gcd(n, order)
    e = discrete_log(ctx, a)
    if e % d:
        return None
    # n k = e (mod p-1)  <=>  (n/d) k = e/d (mod (p-1)/d)
    mod = order // d
    k0 = (e // d) * pow(n // d, -1, mod) % mod if mod > 1 else 0
    g = ctx.primitive_root
    step = pow(g, mod, p)
    mu = pow(g, k0, p)
    best = mu
    for _ in range(d - 1):
        mu = mu * step % p
        best = min(best, mu)
    return best
