"""Exact counts: points on cosets, equation families, energies."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ffield import Coset, Subgroup, nth_root
from .polyalg import BiPoly, UniPoly, ZeroPolynomial, uni_roots

METHODS = ("naive", "rootfind")


class NotHomogeneous(ValueError):
    pass


class RootMissing(ValueError):
    def __init__(self, l: int, n: int):
        super().__init__(f"l = {l} is not gamma times a power x^{n}")
        self.l = l


class CosetCollision(ValueError):
    def __init__(self, li: int, lj: int):
        super().__init__(f"{li} and {lj} lie in the same coset of G")
        self.pair = (li, lj)


class CountMismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class SolutionSet:
    points: tuple[tuple[int, int], ...]
    method: str

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _check_pair(P: BiPoly, c1: Coset, c2: Coset) -> None:
    if P.is_zero():
        raise ZeroPolynomial("P is the zero polynomial")
    if c1.sub.p != c2.sub.p or c1.sub.t != c2.sub.t or c1.sub.p != P.p:
        raise ValueError("cosets must come from the same subgroup of the same field")


def _naive_mask(P: BiPoly, c1: Coset, c2: Coset):
    xs, ys = c1.elements(), c2.elements()
    return xs, ys, P.eval_grid(xs, ys) == 0


def _rootfind_points(P: BiPoly, c1: Coset, c2: Coset, seed: int):
    ys_all = None
    for x0 in c1.elements():
        f = P.at_x(x0)
        if f.is_zero():
            if ys_all is None:
                ys_all = c2.elements()
            for y0 in ys_all:
                yield x0, y0
            continue
        for y0 in uni_roots(f, seed):
            if y0 and y0 in c2:
                yield x0, y0


def count_solutions(P: BiPoly, c1: Coset, c2: Coset, method: str = "rootfind", seed: int = 0) -> SolutionSet:
    """All (x, y) with P(x, y) = 0, x in c1, y in c2.

    ``naive`` evaluates P on the whole t-by-t grid; ``rootfind`` solves
    P(x0, y) = 0 for each x0 in c1 and keeps the roots lying in c2.
    """
    _check_pair(P, c1, c2)
    if method == "naive":
        xs, ys, mask = _naive_mask(P, c1, c2)
        pts = tuple((xs[i], ys[j]) for i, j in zip(*np.nonzero(mask)))
    elif method == "rootfind":
        pts = tuple(sorted(_rootfind_points(P, c1, c2, seed)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return SolutionSet(tuple((int(x), int(y)) for x, y in pts), method)


def count_points(P: BiPoly, c1: Coset, c2: Coset, method: str = "rootfind", seed: int = 0) -> int:
    """Count-only variant of count_solutions."""
    _check_pair(P, c1, c2)
    if method == "naive":
        return int(_naive_mask(P, c1, c2)[2].sum())
    if method == "rootfind":
        return sum(1 for _ in _rootfind_points(P, c1, c2, seed))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class FamilyCount:
    gamma: int
    ls: tuple[int, ...]
    mus: tuple[int, ...]
    per_equation: tuple[int, ...]
    scaled: tuple[int, ...]
    total: int


def count_family(P: BiPoly, gamma: int, ls, sub: Subgroup, method: str = "rootfind", seed: int = 0) -> FamilyCount:
    """Solutions of P(x, y) = l_i over G x G for homogeneous P, summed over i.

    Each l_i = gamma * mu_i**n; the count is taken directly and again as
    the count of P = gamma on the coset mu_i**-1 G, and both must agree.
    """
    ctx = sub.ctx
    p = ctx.p
    if not P.is_homogeneous() or P.is_zero():
        raise NotHomogeneous("P must be a nonzero homogeneous polynomial")
    n = P.total_degree
    gamma %= p
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    ls = tuple(int(l) % p for l in ls)
    if any(l == 0 for l in ls):
        raise ValueError("every l_i must be nonzero")
    for li, lj in combinations(ls, 2):
        if li * pow(lj, -1, p) % p in sub:
            raise CosetCollision(li, lj)
    ginv = pow(gamma, -1, p)
    mus = []
    for l in ls:
        mu = nth_root(ctx, l * ginv % p, n)
        if mu is None:
            raise RootMissing(l, n)
        mus.append(mu)
    G = Coset(1, sub)
    base = P - gamma
    direct, scaled = [], []
    for l, mu in zip(ls, mus):
        d = count_points(P - l, G, G, method, seed)
        home = Coset(pow(mu, -1, p), sub)
        s = count_points(base, home, home, method, seed)
        if d != s:
            raise CountMismatch(f"l={l}: direct count {d} != scaled count {s}")
        direct.append(d)
        scaled.append(s)
    return FamilyCount(gamma, ls, tuple(mus), tuple(direct), tuple(scaled), sum(direct))


def _fiber_sizes(values: np.ndarray) -> np.ndarray:
    return np.unique(values.ravel(), return_counts=True)[1]


def additive_energy(A, B, p: int) -> int:
    """#{(a1, b1, a2, b2) : a1 + b1 = a2 + b2}, A and B taken as sets."""
    a = np.array(sorted({int(v) % p for v in A}), dtype=np.int64)
    b = np.array(sorted({int(v) % p for v in B}), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return 0
    m = _fiber_sizes((a[:, None] + b[None, :]) % p)
    return sum(int(v) ** 2 for v in m)


def polynomial_energy(P: BiPoly, G: Subgroup, q: int) -> int:
    """Sum over c of #{(x, y) in G x G : P(x, y) = c} ** q."""
    if q < 1:
        raise ValueError("q must be at least 1")
    m = _fiber_sizes(P.eval_grid(G.elements, G.elements))
    return sum(int(v) ** q for v in m)


def composed_energy(f: UniPoly, g: UniPoly, G: Subgroup) -> int:
    """Additive energy of the image sets f(G) and g(G)."""
    if f.degree < 1 or g.degree < 1:
        raise ValueError("f and g must be nonconstant")
    return additive_energy({f(x) for x in G.elements}, {g(x) for x in G.elements}, G.p)
