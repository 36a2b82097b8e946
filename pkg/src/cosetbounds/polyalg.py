"""Univariate and bivariate polynomial algebra over F_p.

``BiPoly`` stores a dense int64 coefficient grid ``c[i, j]`` for the term
``x**i * y**j``; products of residues below 2**31 fit in int64, and every
product is reduced before the next addition.  ``UniPoly`` is a plain
coefficient tuple (lowest degree first) with Python-int arithmetic.
"""

from __future__ import annotations

import random
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .ffield import FieldCtx


class BadShape(ValueError):
    pass


class ZeroPolynomial(ValueError):
    pass


class CommonFactor(ValueError):
    pass


class PolySyntaxError(SyntaxError):
    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} at offset {offset}")
        self.offset = offset


class NegativeExponent(PolySyntaxError):
    pass


# below this modulus uni_roots scans the whole field instead of splitting
EXHAUSTIVE_BELOW = 64
# dense grids make x^huge a memory bomb; the parser refuses larger exponents
MAX_EXPONENT = 2**16


# ---------------------------------------------------------------- univariate

class UniPoly:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[int] = ()):
        p = ctx.p
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, ctx: FieldCtx, roots: Iterable[int]) -> "UniPoly":
        out = cls(ctx, [1])
        for r in roots:
            out = out * cls(ctx, [-r, 1])
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.ctx.p == other.ctx.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.coeffs))

    def __repr__(self):
        return f"UniPoly(p={self.ctx.p}, {list(self.coeffs)})"

    def __call__(self, x: int) -> int:
        p = self.ctx.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def _lift(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly(self.ctx, [other])

    def __add__(self, other):
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UniPoly(self.ctx, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly(self.ctx)
        p = self.ctx.p
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return UniPoly(self.ctx, [c % p for c in out])

    __rmul__ = __mul__

    def __divmod__(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.ctx.p
        r = list(self.coeffs)
        db = other.degree
        inv = pow(other.lead(), -1, p)
        if len(r) <= db:
            return UniPoly(self.ctx), self
        q = [0] * (len(r) - db)
        b = other.coeffs
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k] * inv % p
            if c:
                q[k - db] = c
                for i in range(db + 1):
                    r[k - db + i] = (r[k - db + i] - c * b[i]) % p
        return UniPoly(self.ctx, q), UniPoly(self.ctx, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = pow(self.lead(), -1, self.ctx.p)
        return UniPoly(self.ctx, [c * inv for c in self.coeffs])

    def derivative(self) -> "UniPoly":
        return UniPoly(self.ctx, [i * c for i, c in enumerate(self.coeffs)][1:])

    def divides(self, other: "UniPoly") -> bool:
        return (other % self).is_zero()


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def powmod(base: UniPoly, e: int, mod: UniPoly) -> UniPoly:
    result = UniPoly(base.ctx, [1]) % mod
    base = base % mod
    while e:
        if e & 1:
            result = result * base % mod
        base = base * base % mod
        e >>= 1
    return result


def _split_linear(g: UniPoly, rng: random.Random, out: list[int]) -> None:
    # g is monic, squarefree, and a product of distinct linear factors
    p = g.ctx.p
    if g.degree == 0:
        return
    if g.degree == 1:
        out.append(-g.coeffs[0] % p)
        return
    half = (p - 1) // 2
    while True:
        a = rng.randrange(p)
        h = uni_gcd(powmod(UniPoly(g.ctx, [a, 1]), half, g) - 1, g)
        if 0 < h.degree < g.degree:
            _split_linear(h, rng, out)
            _split_linear(g // h, rng, out)
            return


def uni_roots(f: UniPoly, seed: int = 0, exhaustive_below: int | None = None) -> list[int]:
    """Distinct roots of ``f`` in F_p, sorted.

    Isolates the split part ``gcd(y**p - y, f)`` and separates it by random
    equal-degree splitting driven by ``random.Random(seed)``.  Fields smaller
    than ``exhaustive_below`` are scanned directly.
    """
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has every element as a root")
    p = f.ctx.p
    if exhaustive_below is None:
        exhaustive_below = EXHAUSTIVE_BELOW
    if f.degree == 0:
        return []
    if f.degree == 1:
        return [-f.coeffs[0] * pow(f.coeffs[1], -1, p) % p]
    if p < exhaustive_below:
        return [x for x in range(p) if f(x) == 0]
    f = f.monic()
    y = UniPoly(f.ctx, [0, 1])
    g = uni_gcd(powmod(y, p, f) - y, f)
    roots: list[int] = []
    if g.degree >= 1 and g.coeffs[0] == 0:
        roots.append(0)
        g = g // y
    _split_linear(g, random.Random(seed), roots)
    return sorted(roots)


# ----------------------------------------------------------------- bivariate

def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)
    if len(nz[0]) == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return np.ascontiguousarray(c[: nz[0].max() + 1, : nz[1].max() + 1])


def mul_grid(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product of two coefficient grids over the trailing (x, y) axes.

    ``a`` may carry leading batch axes; ``b`` must be 2-D.
    """
    if a.size == 0 or b.size == 0:
        shape = a.shape[:-2] + (0, 0)
        return np.zeros(shape, dtype=np.int64)
    X, Y = a.shape[-2:]
    bx, by = b.shape
    out = np.zeros(a.shape[:-2] + (X + bx - 1, Y + by - 1), dtype=np.int64)
    for i, j in zip(*np.nonzero(b)):
        view = out[..., i : i + X, j : j + Y]
        view += int(b[i, j]) * a
        view %= p
    return out


class BiPoly:
    """Bivariate polynomial over F_p with bidegree ``(m, n)``."""

    __slots__ = ("ctx", "c", "_hash")

    def __init__(self, ctx: FieldCtx, coeffs):
        arr = np.asarray(coeffs)
        if arr.dtype.kind in "iu" and arr.dtype.itemsize <= 8 and arr.dtype != np.uint64:
            arr = arr.astype(np.int64) % ctx.p
        else:
            arr = np.array(np.asarray(coeffs, dtype=object) % ctx.p, dtype=np.int64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2:
            raise BadShape("coefficient grid must be two-dimensional")
        self.ctx = ctx
        self.c = _trim(arr)
        self.c.flags.writeable = False
        self._hash = None

    # construction helpers
    @classmethod
    def from_terms(cls, ctx: FieldCtx, terms: Mapping[tuple[int, int], int]) -> "BiPoly":
        if not terms:
            return cls.zero(ctx)
        mx = max(i for i, _ in terms) + 1
        my = max(j for _, j in terms) + 1
        arr = np.zeros((mx, my), dtype=np.int64)
        for (i, j), v in terms.items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            arr[i, j] = (int(arr[i, j]) + v) % ctx.p
        return cls(ctx, arr)

    @classmethod
    def zero(cls, ctx: FieldCtx) -> "BiPoly":
        return cls(ctx, np.zeros((0, 0), dtype=np.int64))

    @classmethod
    def const(cls, ctx: FieldCtx, v: int) -> "BiPoly":
        return cls(ctx, np.array([[v % ctx.p]], dtype=np.int64))

    @classmethod
    def x(cls, ctx: FieldCtx) -> "BiPoly":
        return cls.from_terms(ctx, {(1, 0): 1})

    @classmethod
    def y(cls, ctx: FieldCtx) -> "BiPoly":
        return cls.from_terms(ctx, {(0, 1): 1})

    @classmethod
    def from_y_coeffs(cls, ctx: FieldCtx, cols: list[UniPoly]) -> "BiPoly":
        """Build sum_j cols[j](x) * y**j."""
        mx = max((len(u.coeffs) for u in cols), default=0)
        arr = np.zeros((mx, len(cols)), dtype=np.int64)
        for j, u in enumerate(cols):
            arr[: len(u.coeffs), j] = u.coeffs
        return cls(ctx, arr)

    # structure
    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def bidegree(self) -> tuple[int, int]:
        if self.c.size == 0:
            return (-1, -1)
        return (self.c.shape[0] - 1, self.c.shape[1] - 1)

    @property
    def deg_x(self) -> int:
        return self.bidegree[0]

    @property
    def deg_y(self) -> int:
        return self.bidegree[1]

    @property
    def total_degree(self) -> int:
        if self.c.size == 0:
            return -1
        i, j = np.nonzero(self.c)
        return int((i + j).max())

    @property
    def terms(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): int(self.c[i, j]) for i, j in zip(*np.nonzero(self.c))}

    def is_zero(self) -> bool:
        return self.c.size == 0

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        i, j = np.nonzero(self.c)
        return len(set((i + j).tolist())) == 1

    def coeff(self, i: int, j: int) -> int:
        if i < self.c.shape[0] and j < self.c.shape[1]:
            return int(self.c[i, j])
        return 0

    def y_coeff(self, j: int) -> UniPoly:
        """The coefficient of y**j, as a polynomial in x."""
        if j >= self.c.shape[1]:
            return UniPoly(self.ctx)
        return UniPoly(self.ctx, self.c[:, j].tolist())

    def x_coeff(self, i: int) -> UniPoly:
        if i >= self.c.shape[0]:
            return UniPoly(self.ctx)
        return UniPoly(self.ctx, self.c[i, :].tolist())

    def at_x(self, x0: int) -> UniPoly:
        """P(x0, y) as a polynomial in y."""
        if self.is_zero():
            return UniPoly(self.ctx)
        p = self.ctx.p
        powers = [pow(x0, i, p) for i in range(self.c.shape[0])]
        return UniPoly(self.ctx, [sum(int(v) * w for v, w in zip(col, powers)) for col in self.c.T.tolist()])

    def at_y(self, y0: int) -> UniPoly:
        """P(x, y0) as a polynomial in x."""
        if self.is_zero():
            return UniPoly(self.ctx)
        p = self.ctx.p
        powers = [pow(y0, j, p) for j in range(self.c.shape[1])]
        return UniPoly(self.ctx, [sum(int(v) * w for v, w in zip(row, powers)) for row in self.c.tolist()])

    def __call__(self, x0: int, y0: int) -> int:
        return self.at_x(x0)(y0)

    def eval_grid(self, xs, ys) -> np.ndarray:
        """Values P(x, y) for all x in xs (rows) and y in ys (columns)."""
        p = self.ctx.p
        xs = np.asarray(xs, dtype=np.int64) % p
        ys = np.asarray(ys, dtype=np.int64) % p
        out = np.zeros((len(xs), len(ys)), dtype=np.int64)
        if self.is_zero():
            return out
        mx, my = self.c.shape
        xp = np.ones((mx, len(xs)), dtype=np.int64)
        for i in range(1, mx):
            xp[i] = xp[i - 1] * xs % p
        yp = np.ones((my, len(ys)), dtype=np.int64)
        for j in range(1, my):
            yp[j] = yp[j - 1] * ys % p
        for j in range(my):
            col = self.c[:, j]
            if not col.any():
                continue
            # coefficient of y^j evaluated at every x (Horner keeps values < p)
            cx = np.zeros(len(xs), dtype=np.int64)
            for i in range(mx - 1, -1, -1):
                cx = (cx * xs + int(col[i])) % p
            out = (out + np.outer(cx, yp[j]) % p) % p
        return out

    # arithmetic
    def _lift(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            if other.ctx.p != self.ctx.p:
                raise ValueError("polynomials over different fields")
            return other
        return BiPoly.const(self.ctx, int(other))

    def _add_arrays(self, a, b, sign):
        X = max(a.shape[0], b.shape[0])
        Y = max(a.shape[1], b.shape[1])
        out = np.zeros((X, Y), dtype=np.int64)
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += sign * b
        return BiPoly(self.ctx, out)

    def __add__(self, other):
        return self._add_arrays(self.c, self._lift(other).c, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._add_arrays(self.c, self._lift(other).c, -1)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return BiPoly(self.ctx, -self.c)

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return BiPoly(self.ctx, self.c * (int(other) % self.ctx.p))
        other = self._lift(other)
        a, b = self.c, other.c
        if np.count_nonzero(a) < np.count_nonzero(b):
            a, b = b, a
        return BiPoly(self.ctx, mul_grid(a, b, self.ctx.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = BiPoly.const(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = BiPoly.const(self.ctx, other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.ctx.p == other.ctx.p and self.c.shape == other.c.shape and bool((self.c == other.c).all())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.p, self.c.shape, self.c.tobytes()))
        return self._hash

    def __repr__(self):
        return f"BiPoly(p={self.ctx.p}, {self})"

    def __str__(self):
        return format_poly(self)

    def partial(self, var: str) -> "BiPoly":
        return partial(self, var)


def partial(P: BiPoly, var: str) -> BiPoly:
    """Formal partial derivative; exponents act as field elements."""
    if P.is_zero():
        return P
    c = P.c
    if var == "x":
        k = np.arange(1, c.shape[0], dtype=np.int64)[:, None] % P.p
        return BiPoly(P.ctx, c[1:, :] * k)
    if var == "y":
        k = np.arange(1, c.shape[1], dtype=np.int64)[None, :] % P.p
        return BiPoly(P.ctx, c[:, 1:] * k)
    raise ValueError(f"unknown variable {var!r}")


# ---------------------------------------------------------- pseudo-division

def _mul_x(a: np.ndarray, f: np.ndarray, p: int, x_out: int) -> np.ndarray:
    """Multiply grids a[..., X, Y] by the x-polynomial f, keeping x_out rows."""
    X = a.shape[-2]
    out = np.zeros(a.shape[:-2] + (x_out, a.shape[-1]), dtype=np.int64)
    for s in np.nonzero(f)[0]:
        hi = min(x_out, s + X)
        if hi <= s:
            continue
        view = out[..., s:hi, :]
        view += int(f[s]) * a[..., : hi - s, :]
        view %= p
    return out


def prem_grid(Q: np.ndarray, P: BiPoly, y_extent: int | None = None) -> np.ndarray:
    """Pseudo-remainder of Q by P in y, with a fixed multiplier.

    ``Q`` has shape ``(..., X, Y)``.  Every y-power ``n <= j < y_extent`` is
    eliminated whether or not its coefficient is zero, so the result is
    ``f_n**(y_extent - n) * Q mod P`` with ``f_n`` the leading y-coefficient
    of P.  The multiplier does not depend on Q, hence the map is linear.
    Output shape is ``(..., X + (y_extent - n) * m, n)``; when
    ``y_extent <= n`` Q is returned unchanged.
    """
    p = P.p
    m, n = P.bidegree
    if n < 1:
        raise BadShape("P must have positive degree in y")
    Y = Q.shape[-1] if y_extent is None else y_extent
    if Q.shape[-1] > Y:
        raise BadShape("Q exceeds the declared y extent")
    if Y <= n:
        return np.array(Q, dtype=np.int64)
    X = Q.shape[-2]
    Xf = X + (Y - n) * m
    work = np.zeros(Q.shape[:-2] + (Xf, Y), dtype=np.int64)
    work[..., :X, : Q.shape[-1]] = Q
    fn = P.c[:, n]
    lower = [(int(s), int(v), int(P.c[s, v])) for s, v in zip(*np.nonzero(P.c[:, :n]))]
    for j in range(Y - 1, n - 1, -1):
        lead = work[..., :, j].copy()
        work = _mul_x(work[..., :, :j], fn, p, Xf)
        if not lead.any():
            continue
        for s, v, coef in lower:
            view = work[..., s:, v + j - n]
            view -= coef * lead[..., : Xf - s]
            view %= p
    return work


def pseudo_remainder(Q: BiPoly, P: BiPoly) -> BiPoly:
    return BiPoly(Q.ctx, prem_grid(Q.c, P)) if not Q.is_zero() else Q


def divides(P: BiPoly, Q: BiPoly) -> bool:
    """Whether P divides Q in F_p[x, y].

    Exact when gcd(f_n, P) = 1, which holds for irreducible P of positive
    y-degree (f_n is the leading y-coefficient).
    """
    if P.deg_y < 1:
        raise BadShape("P must have positive degree in y")
    if Q.is_zero():
        return True
    return not prem_grid(Q.c, P).any()


# --------------------------------------------------------------- resultants

def _bareiss_det(M: list[list[UniPoly]], ctx: FieldCtx) -> UniPoly:
    n = len(M)
    M = [row[:] for row in M]
    sign = 1
    prev = UniPoly(ctx, [1])
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return UniPoly(ctx)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                q, r = divmod(num, prev)
                assert r.is_zero(), "Bareiss division must be exact"
                M[i][j] = q
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant_y(P: BiPoly, Q: BiPoly) -> UniPoly:
    """Res_y(P, Q) as a polynomial in x (Sylvester determinant)."""
    n1, n2 = P.deg_y, Q.deg_y
    if n1 < 1 or n2 < 1:
        raise BadShape("both polynomials need positive degree in y")
    ctx = P.ctx
    zero = UniPoly(ctx)
    pc = [P.y_coeff(j) for j in range(n1, -1, -1)]
    qc = [Q.y_coeff(j) for j in range(n2, -1, -1)]
    size = n1 + n2
    rows = []
    for r in range(n2):
        rows.append([zero] * r + pc + [zero] * (size - r - len(pc)))
    for r in range(n1):
        rows.append([zero] * r + qc + [zero] * (size - r - len(qc)))
    return _bareiss_det(rows, ctx)


def singular_points(P: BiPoly, seed: int = 0) -> set[tuple[int, int]]:
    """Points of F_p**2 where P and dP/dy both vanish."""
    if P.deg_y < 1:
        raise BadShape("P must have positive degree in y")
    Py = partial(P, "y")
    if Py.is_zero():
        raise CommonFactor("dP/dy vanishes identically")
    if Py.deg_y == 0:
        xs = uni_roots(Py.y_coeff(0), seed) if Py.y_coeff(0).degree > 0 else []
    else:
        res = resultant_y(P, Py)
        if res.is_zero():
            raise CommonFactor("Res_y(P, dP/dy) vanishes: P is not squarefree in y")
        xs = uni_roots(res, seed)
    out: set[tuple[int, int]] = set()
    for x0 in xs:
        a, b = P.at_x(x0), Py.at_x(x0)
        g = uni_gcd(a, b)
        if g.is_zero():
            raise CommonFactor(f"x - {x0} divides both P and dP/dy")
        out.update((x0, y0) for y0 in uni_roots(g, seed))
    return out


# ------------------------------------------------------------ text format

def _format_term(c: int, i: int, j: int) -> str:
    parts = []
    if c != 1 or (i == 0 and j == 0):
        parts.append(str(c))
    for var, e in (("x", i), ("y", j)):
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
    return "*".join(parts)


def format_poly(P: BiPoly) -> str:
    """Canonical text: graded-lex order, explicit ``*`` and ``^``."""
    terms = P.terms
    if not terms:
        return "0"
    order = sorted(terms, key=lambda ij: (-(ij[0] + ij[1]), -ij[0]))
    return " + ".join(_format_term(terms[ij], *ij) for ij in order)


class _Parser:
    def __init__(self, text: str, ctx: FieldCtx):
        self.text = text
        self.ctx = ctx
        self.i = 0

    def offset(self, i: int | None = None) -> int:
        i = self.i if i is None else i
        return len(self.text[:i].encode())

    def fail(self, msg: str, at: int | None = None, cls=PolySyntaxError):
        raise cls(msg, self.offset(at))

    def skip(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def number(self) -> int:
        self.skip()
        start = self.i
        while self.i < len(self.text) and self.text[self.i] in "0123456789":
            self.i += 1
        if start == self.i:
            self.fail("expected integer")
        return int(self.text[start : self.i])

    def parse(self) -> BiPoly:
        out = self.expr()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")
        return out

    def expr(self) -> BiPoly:
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.i]
            self.i += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> BiPoly:
        acc = self.unary()
        while self.peek() == "*":
            self.i += 1
            acc = acc * self.unary()
        return acc

    def unary(self) -> BiPoly:
        if self.peek() == "-":
            self.i += 1
            return -self.unary()
        return self.power()

    def power(self) -> BiPoly:
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            if self.peek() == "-":
                self.fail("negative exponent", cls=NegativeExponent)
            if not self.peek().isdigit():
                self.fail("exponent must be a nonnegative integer")
            at = self.i
            e = self.number()
            if e > MAX_EXPONENT:
                self.fail(f"exponent {e} exceeds {MAX_EXPONENT}", at)
            base = base**e
        return base

    def atom(self) -> BiPoly:
        ch = self.peek()
        if ch == "(":
            self.i += 1
            inner = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.i += 1
            return inner
        if ch == "x":
            self.i += 1
            return BiPoly.x(self.ctx)
        if ch == "y":
            self.i += 1
            return BiPoly.y(self.ctx)
        if ch.isdigit():
            return BiPoly.const(self.ctx, self.number())
        self.fail("expected operand" if not ch else f"unexpected {ch!r}")


def parse_poly(text: str, ctx: FieldCtx) -> BiPoly:
    return _Parser(text, ctx).parse()


def uni_from_bipoly_x(P: BiPoly) -> UniPoly:
    """View a polynomial in x alone as a UniPoly."""
    if P.deg_y > 0:
        raise BadShape("polynomial depends on y")
    return P.y_coeff(0)


def product(polys: Iterable[BiPoly], ctx: FieldCtx) -> BiPoly:
    return reduce(lambda a, b: a * b, polys, BiPoly.const(ctx, 1))
