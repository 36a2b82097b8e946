"""Stepanov auxiliary polynomials as explicit linear-algebra certificates.

The auxiliary polynomial is

    Psi(x, y) = sum_{a<A, b<B, c<C} lam[a,b,c] * x**a * x**(b*t) * y**(c*t).

On a coset point x**t = gamma1 and y**t = gamma2, so the operator images

    D_k Psi = (dP/dy)**(2k-1) * x**k * y**k * (d/dx)**k Psi        (k >= 1)

restricted to the coset equal R_k(x, y) = sum lam * gamma1**b * gamma2**c *
x**a * W_k(a + b t, c t)(x, y), where W_k(alpha, beta) is the polynomial
factor produced by the operator on the monomial x**alpha * y**beta.
W_k is a polynomial in (alpha, beta); it is computed once per k as a
coefficient array ``W[i, j, u, v]`` for ``alpha**i beta**j x**u y**v``.
Requiring P | R_k for k < D gives a homogeneous system in lam.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np

from .counting import SolutionSet, count_solutions
from .ffield import Coset
from .modlinalg import MAX_ENTRIES, MatFp, MatrixTooLarge, matmul_mod, matvec, nullspace_vector
from .polyalg import BiPoly, CommonFactor, mul_grid, parse_poly, partial, prem_grid, singular_points, uni_roots


class OrderTooLarge(ValueError):
    pass


class ParamsInfeasible(ValueError):
    pass


class NoKernel(RuntimeError):
    pass


class PrecondViolated(ValueError):
    pass


class SingularEvaluation(ZeroDivisionError):
    pass


# ------------------------------------------------------ curve derivatives

@dataclass(frozen=True)
class DerivPair:
    k: int
    q: BiPoly
    r: BiPoly


class _DerivChain:
    """q_k, r_k for k = 1, 2, ... extended on demand."""

    def __init__(self, P: BiPoly):
        self.Px, self.Py = partial(P, "x"), partial(P, "y")
        self.Pxy, self.Pyy = partial(self.Px, "y"), partial(self.Py, "y")
        self.r1sq = self.Py * self.Py
        self.pairs = [DerivPair(1, -self.Px, self.Py)]

    def upto(self, kmax: int) -> list[DerivPair]:
        Px, Py = self.Px, self.Py
        while len(self.pairs) < kmax:
            k = len(self.pairs)
            q, r = self.pairs[-1].q, self.pairs[-1].r
            w = 2 * k - 1
            q = partial(q, "x") * self.r1sq - partial(q, "y") * Px * Py - (q * self.Pxy * Py) * w + (q * self.Pyy * Px) * w
            self.pairs.append(DerivPair(k + 1, q, r * self.r1sq))
        return self.pairs[:kmax]


@lru_cache(maxsize=64)
def _chain(P: BiPoly) -> _DerivChain:
    return _DerivChain(P)


def derivative_pair(P: BiPoly, k: int) -> DerivPair:
    """q_k, r_k with d^k y / dx^k = q_k / r_k on the curve P = 0."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k >= P.p:
        raise OrderTooLarge(f"derivative order {k} >= p = {P.p}")
    if P.deg_y < 1:
        raise ValueError("P must depend on y")
    return _chain(P).upto(k)[k - 1]


# --------------------------------------------------- operator polynomials

def _pad_to(a: np.ndarray, shape) -> np.ndarray:
    if a.shape == tuple(shape):
        return a
    out = np.zeros(shape, dtype=np.int64)
    out[tuple(slice(0, s) for s in a.shape)] = a
    return out


def _combine(parts, p: int) -> np.ndarray:
    """Sum of (coefficient, array) pairs, padding to a common shape."""
    shape = tuple(max(s) for s in zip(*(a.shape for _, a in parts)))
    out = np.zeros(shape, dtype=np.int64)
    for coef, a in parts:
        coef %= p
        if coef and a.size:
            out[tuple(slice(0, s) for s in a.shape)] += coef * a % p
            out %= p
    return out


def _dgrid(W: np.ndarray, axis: int, p: int) -> np.ndarray:
    """Partial derivative of batched grids along x (axis=-2) or y (axis=-1)."""
    n = W.shape[axis]
    if n <= 1:
        return np.zeros(W.shape[:-2] + (1, 1), dtype=np.int64)
    k = np.arange(1, n, dtype=np.int64) % p
    shape = [1] * W.ndim
    shape[axis] = n - 1
    sl = [slice(None)] * W.ndim
    sl[axis] = slice(1, None)
    return W[tuple(sl)] * k.reshape(shape) % p


def _shift(W: np.ndarray, axis: int) -> np.ndarray:
    """Multiply by alpha (axis 0) or beta (axis 1) in symbolic mode."""
    pad = [(0, 0)] * W.ndim
    pad[axis] = (1, 0)
    return np.pad(W, pad)


class _Operator:
    """Recurrence for W_k; symbolic in (alpha, beta) or at fixed values."""

    def __init__(self, P: BiPoly, alpha: int | None = None, beta: int | None = None):
        p = P.p
        self.p = p
        self.alpha, self.beta = alpha, beta
        ctx = P.ctx
        X, Y = BiPoly.x(ctx), BiPoly.y(ctx)
        r1 = partial(P, "y")
        q1 = -partial(P, "x")
        r1x, r1y = partial(r1, "x"), partial(r1, "y")
        self.first_a = (Y * r1).c
        self.first_b = (X * q1).c
        self.s_a = (Y * r1 * r1).c
        self.s_b = (X * r1 * q1).c
        self.s_dx = (X * Y * r1 * r1).c
        self.s_dy = (X * Y * r1 * q1).c
        self.s_0 = (X * Y * (r1 * r1x + q1 * r1y)).c

    def _mul(self, W, S):
        return mul_grid(W, S, self.p) if S.size else np.zeros(W.shape[:2] + (1, 1), dtype=np.int64)

    def _times_alpha(self, W):
        return _shift(W, 0) if self.alpha is None else W * (self.alpha % self.p) % self.p

    def _times_beta(self, W):
        return _shift(W, 1) if self.beta is None else W * (self.beta % self.p) % self.p

    def series(self, kmax: int) -> list[np.ndarray]:
        p = self.p
        one = np.ones((1, 1, 1, 1), dtype=np.int64)
        out = [one]
        if kmax == 0:
            return out
        W = _combine([
            (1, self._times_alpha(mul_grid(one, self.first_a, p))),
            (1, self._times_beta(mul_grid(one, self.first_b, p))),
        ], p)
        out.append(W)
        for k in range(1, kmax):
            A = self._mul(W, self.s_a)
            Bm = self._mul(W, self.s_b)
            W = _combine([
                (1, self._times_alpha(A)), (-k, A),
                (1, self._times_beta(Bm)), (-k, Bm),
                (1, self._mul(_dgrid(W, -2, p), self.s_dx)),
                (1, self._mul(_dgrid(W, -1, p), self.s_dy)),
                (-(2 * k - 1), self._mul(W, self.s_0)),
            ], p)
            out.append(W)
        return out


@lru_cache(maxsize=16)
def operator_families(P: BiPoly, kmax: int) -> tuple[np.ndarray, ...]:
    """W_0 .. W_kmax as arrays indexed [alpha_pow, beta_pow, x_pow, y_pow]."""
    fams = _Operator(P).series(kmax)
    for W in fams:
        W.flags.writeable = False
    return tuple(fams)


def operator_factors(P: BiPoly, t: int, kmax: int, a: int, b: int, c: int) -> list[BiPoly]:
    """R_{k,a,b,c} for k = 0..kmax."""
    if kmax >= P.p:
        raise OrderTooLarge(f"operator order {kmax} >= p = {P.p}")
    return [BiPoly(P.ctx, W[0, 0]) for W in _Operator(P, alpha=a + b * t, beta=c * t).series(kmax)]


def operator_factor(P: BiPoly, t: int, k: int, a: int, b: int, c: int) -> BiPoly:
    """R_{k,a,b,c}: D_k (x**a x**(bt) y**(ct)) = R * x**a x**(bt) y**(ct)."""
    return operator_factors(P, t, k, a, b, c)[k]


# ------------------------------------------------------------- parameters

@dataclass(frozen=True)
class StepanovParams:
    t: int
    m: int
    n: int
    h: int
    A: int
    B: int
    C: int
    D: int

    @property
    def unknowns(self) -> int:
        return self.A * self.B * self.C

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("t", "m", "n", "h", "A", "B", "C", "D")}


def _iroot(v: int, k: int) -> int:
    return int(gmpy2.iroot(gmpy2.mpz(v), k)[0])


def choose_params(m: int, n: int, t: int, h: int = 1) -> StepanovParams:
    """Box sizes A, B = C and vanishing order D from the subgroup order t.

    h = 1:  A = floor(t^(2/3) / n), B = C = floor(t^(1/3)), D = floor(B^2 / (4 m n^2))
    h > 1:  A = floor(h^(-1/2) t^(2/3)), B = C = floor(h^(1/4) t^(1/3)),
            D = floor(h^(-1/2) t^(2/3) / (4 n^3))
    """
    if t < 2 or h < 1 or m < 1 or n < 1:
        raise ParamsInfeasible("need t >= 2, h >= 1, m, n >= 1")
    if h == 1:
        A = _iroot(t * t, 3) // n
        B = _iroot(t, 3)
        D = B * B // (4 * m * n * n)
    else:
        root = _iroot(t**4 // h**3, 6)
        A = root
        B = _iroot(h**3 * t**4, 12)
        D = root // (4 * n**3)
    params = StepanovParams(t, m, n, h, A, B, B, D)
    for name in ("A", "B", "C", "D"):
        if getattr(params, name) < 1:
            raise ParamsInfeasible(f"{name}={getattr(params, name)}")
    if n * A * B > t:
        raise ParamsInfeasible(f"nAB={n * A * B} > t={t}")
    return params


# ---------------------------------------------------------- linear system

def column_order(params: StepanovParams) -> np.ndarray:
    """Unknown indices (a, b, c) in graded order: by a+b+c, then a, b, c."""
    idx = [(a, b, c) for a in range(params.A) for b in range(params.B) for c in range(params.C)]
    idx.sort(key=lambda v: (sum(v), v))
    return np.array(idx, dtype=np.int64).reshape(-1, 3)


def _block_shape(params: StepanovParams, k: int) -> tuple[int, int, int]:
    """(y extent fed to pseudo-division, remainder y rows, remainder x rows)."""
    A, m, n = params.A, params.m, params.n
    if k == 0:
        return 1, 1, A
    y_extent = 4 * k * n + 1
    e = y_extent - n
    return y_extent, n, A + 4 * k * m + e * m + 1


def system_rows(params: StepanovParams, pairs: int = 1) -> int:
    return pairs * sum(ny * nx for _, ny, nx in (_block_shape(params, k) for k in range(params.D)))


def _powers(base: np.ndarray, count: int, p: int) -> np.ndarray:
    out = np.ones((len(base), max(count, 1)), dtype=np.int64)
    for i in range(1, count):
        out[:, i] = out[:, i - 1] * base % p
    return out


def build_system(P: BiPoly, params: StepanovParams, gamma_pairs) -> MatFp:
    """Rows forcing P | R_k for k < D, for every (gamma1, gamma2) pair.

    Each block pseudo-divides R_k by P in y with the fixed multiplier
    f_n**(4kn - n + 1), so row counts follow the a-priori degree box
    deg_x R_k <= A + 4km, deg_y R_k <= 4kn.  For k = 0, R_0 has y-degree 0
    and the condition is R_0 = 0 (A rows).  Columns follow column_order.
    """
    p = P.p
    m, n = P.bidegree
    if (m, n) != (params.m, params.n) and params.h == 1:
        raise ValueError("params were chosen for a different bidegree")
    if P.coeff(0, 0) == 0:
        raise PrecondViolated("P(0,0) = 0")
    if P.at_y(0).degree < 1:
        raise PrecondViolated("deg P(x,0) < 1")
    gamma_pairs = [(int(g1) % p, int(g2) % p) for g1, g2 in gamma_pairs]
    cols = column_order(params)
    ncols = len(cols)
    nrows = system_rows(params, len(gamma_pairs))
    if nrows * ncols > MAX_ENTRIES:
        raise MatrixTooLarge(f"{nrows}x{ncols} exceeds {MAX_ENTRIES} entries")
    a, b, c = cols[:, 0], cols[:, 1], cols[:, 2]
    t, D = params.t, params.D
    alpha = (a + b * (t % p)) % p
    beta = c * (t % p) % p
    apow = _powers(alpha, D, p)
    bpow = _powers(beta, D, p)
    fams = operator_families(P, D - 1)
    M = np.zeros((nrows, ncols), dtype=np.int64)
    col_idx = np.arange(ncols)
    row0 = 0
    for g1, g2 in gamma_pairs:
        weight = _powers(np.array([g1]), params.B, p)[0][b] * _powers(np.array([g2]), params.C, p)[0][c] % p
        for k in range(D):
            y_extent, ny, nx = _block_shape(params, k)
            W = fams[k]
            if W.shape[-1] > y_extent or W.shape[-2] + params.A - 1 > nx:
                raise AssertionError("operator polynomial exceeds its degree box")
            PR = prem_grid(W, P, y_extent)
            I, J, Xr, Yr = PR.shape
            assert Yr <= ny and params.A - 1 + Xr <= nx
            coef = (apow[:, :I, None] * bpow[:, None, :J] % p).reshape(ncols, I * J)
            coef = coef * weight[:, None] % p
            K = matmul_mod(coef, PR.reshape(I * J, Xr * Yr), p).reshape(ncols, Xr, Yr)
            u = np.arange(Xr)
            v = np.arange(Yr)
            rows = row0 + v[None, None, :] * nx + a[:, None, None] + u[None, :, None]
            M[rows.ravel(), np.repeat(col_idx, Xr * Yr)] = K.ravel()
            row0 += ny * nx
    return MatFp(P.ctx, M)


# ------------------------------------------------------------ certificate

@dataclass
class StepanovCertificate:
    p: int
    poly: str
    cosets: list[tuple[int, int]]
    params: StepanovParams
    matrix_shape: tuple[int, int]
    lam: np.ndarray = field(repr=False)
    psi_degree: int
    raw_bound: int
    corrections: dict[str, int]
    bound: int
    closed_form_bound: int
    exact_count: int
    checks: dict[str, bool]

    @property
    def correction_total(self) -> int:
        return sum(self.corrections.values())

    @property
    def ok(self) -> bool:
        required = ("nonzero_lambda", "nab_le_t", "p00_nonzero", "system_solved", "point_vanishing_verified")
        return all(self.checks[k] for k in required)

    def to_json(self) -> str:
        cols = column_order(self.params)
        doc = {
            "p": self.p,
            "poly": self.poly,
            "cosets": [list(c) for c in self.cosets],
            "params": self.params.as_dict(),
            "matrix_shape": list(self.matrix_shape),
            "psi_degree": self.psi_degree,
            "raw_bound": self.raw_bound,
            "corrections": dict(self.corrections),
            "bound": self.bound,
            "closed_form_bound": self.closed_form_bound,
            "exact_count": self.exact_count,
            "checks": dict(self.checks),
            "lambda": [[int(a), int(b), int(c), int(v)] for (a, b, c), v in zip(cols.tolist(), self.lam.tolist()) if v],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StepanovCertificate":
        doc = json.loads(text)
        params = StepanovParams(**doc["params"])
        cols = column_order(params)
        pos = {tuple(v): i for i, v in enumerate(cols.tolist())}
        lam = np.zeros(len(cols), dtype=np.int64)
        for a, b, c, v in doc["lambda"]:
            lam[pos[(a, b, c)]] = v
        return cls(
            p=doc["p"], poly=doc["poly"], cosets=[tuple(c) for c in doc["cosets"]], params=params,
            matrix_shape=tuple(doc["matrix_shape"]), lam=lam, psi_degree=doc["psi_degree"],
            raw_bound=doc["raw_bound"], corrections=doc["corrections"], bound=doc["bound"],
            closed_form_bound=doc["closed_form_bound"], exact_count=doc["exact_count"], checks=doc["checks"],
        )


def _raw_bound(params: StepanovParams) -> int:
    t = params.t
    deg = (params.A - 1) + (params.B - 1) * t + (params.C - 1) * t
    return deg * (params.m + params.n) // params.D


def _roots_count(f, p: int) -> int:
    if f.is_zero():
        return p
    return len(uni_roots(f)) if f.degree > 0 else 0


def _psi_value(lam, cols, t: int, x0: int, y0: int, p: int) -> int:
    a, b, c = cols[:, 0], cols[:, 1], cols[:, 2]
    xt, yt = pow(x0, t, p), pow(y0, t, p)
    acc = 0
    for ai, bi, ci, v in zip(a.tolist(), b.tolist(), c.tolist(), lam.tolist()):
        if v:
            acc += v * pow(x0, ai, p) * pow(xt, bi, p) * pow(yt, ci, p)
    return acc % p


def _nondivisibility_witness(P: BiPoly, lam, cols, t: int, limit: int = 64):
    """An F_p point on P = 0 where Psi does not vanish (proves P does not divide Psi)."""
    p = P.p
    nz = lam != 0
    lam, cols = lam[nz], cols[nz]
    tried = 0
    for x0 in range(1, p):
        f = P.at_x(x0)
        if f.is_zero():
            continue
        for y0 in uni_roots(f):
            if _psi_value(lam, cols, t, x0, y0, p):
                return (x0, y0)
            tried += 1
            if tried >= limit:
                return None
    return None


def _certify(P: BiPoly, coset_pairs: list[tuple[Coset, Coset]], params: StepanovParams, solutions: SolutionSet,
             closed_form_bound: int) -> StepanovCertificate:
    p = P.p
    t = params.t
    if params.D >= p:
        raise ParamsInfeasible(f"D={params.D} >= p={p}")
    gamma_pairs = [(c1.gamma, c2.gamma) for c1, c2 in coset_pairs]
    M = build_system(P, params, gamma_pairs)
    lam = nullspace_vector(M)
    if lam is None:
        raise NoKernel(f"trivial kernel for a {M.rows}x{M.cols} system")
    cols = column_order(params)
    nz = np.nonzero(lam)[0]
    psi_degree = int(max(cols[i, 0] + (cols[i, 1] + cols[i, 2]) * t for i in nz))

    Py = partial(P, "y")
    try:
        n_sing = len(singular_points(P))
        squarefree = True
    except CommonFactor:
        n_sing, squarefree = 0, False
    corrections = {
        "x_axis": _roots_count(P.at_x(0), p),
        "y_axis": _roots_count(P.at_y(0), p),
        "singular": params.D * n_sing,
        "dPdy_zero_on_cosets": params.D * sum(1 for x0, y0 in solutions if Py(x0, y0) == 0),
    }
    raw = _raw_bound(params)
    cert = StepanovCertificate(
        p=p, poly=str(P), cosets=[(c1.rep, c2.rep) for c1, c2 in coset_pairs], params=params,
        matrix_shape=M.shape, lam=lam, psi_degree=psi_degree, raw_bound=raw, corrections=corrections,
        bound=raw + sum(corrections.values()), closed_form_bound=closed_form_bound,
        exact_count=len(solutions), checks={},
    )
    cert.checks.update(
        nonzero_lambda=bool(len(nz)),
        nab_le_t=params.n * params.A * params.B <= t,
        p00_nonzero=P.coeff(0, 0) != 0,
        deg_px0_positive=P.at_y(0).degree >= 1,
        rows_lt_cols=M.rows < M.cols,
        d_lt_p=params.D < p,
        squarefree_in_y=squarefree,
        system_solved=not matvec(M, lam).any(),
    )
    cert.checks["point_vanishing_verified"] = verify_certificate(cert, P, [c for c, _ in coset_pairs],
                                                                 [c for _, c in coset_pairs], solutions)
    cert.checks["psi_not_divisible"] = _nondivisibility_witness(P, lam, cols, t) is not None
    cert.checks["bound_dominates_count"] = cert.bound >= cert.exact_count
    return cert


def construct_certificate(P: BiPoly, c1: Coset, c2: Coset, params: StepanovParams | None = None,
                          seed: int = 0) -> StepanovCertificate:
    """Build, solve and check the auxiliary-polynomial system for one coset pair."""
    from .bounds import bound_th1

    if c1.sub.t != c2.sub.t or c1.sub.p != c2.sub.p:
        raise ValueError("cosets must share a subgroup")
    if P.coeff(0, 0) == 0:
        raise PrecondViolated("P(0,0) = 0")
    if P.at_y(0).degree < 1:
        raise PrecondViolated("deg P(x,0) < 1")
    m, n = P.bidegree
    t = c1.sub.t
    if params is None:
        params = choose_params(m, n, t, 1)
    sols = count_solutions(P, c1, c2, "rootfind", seed)
    return _certify(P, [(c1, c2)], params, sols, bound_th1(m, n, t).floor())


def construct_family_certificate(P: BiPoly, gamma: int, ls, sub, params: StepanovParams | None = None,
                                 seed: int = 0) -> StepanovCertificate:
    """Certificate for P(x, y) = l_i summed over i, via P = gamma on mu_i**-1 G."""
    from .bounds import bound_thsr
    from .counting import count_family

    fam = count_family(P, gamma, ls, sub, "rootfind", seed)
    curve = P - gamma
    m, n = curve.bidegree
    h = len(fam.ls)
    if params is None:
        params = choose_params(n, n, sub.t, h)
    pairs = []
    points = []
    for mu in fam.mus:
        home = Coset(pow(mu, -1, sub.p), sub)
        pairs.append((home, home))
        points.extend(count_solutions(curve, home, home, "rootfind", seed).points)
    sols = SolutionSet(tuple(sorted(points)), "rootfind")
    params = StepanovParams(params.t, m, n, h, params.A, params.B, params.C, params.D)
    return _certify(curve, pairs, params, sols, bound_thsr(n, h, sub.t).floor())


# --------------------------------------------------------- verification

def _ser_mul(a: list[int], b: list[int], p: int) -> list[int]:
    D = len(a)
    out = [0] * D
    for i, ai in enumerate(a):
        if ai:
            for j in range(D - i):
                out[i + j] += ai * b[j]
    return [v % p for v in out]


def _ser_pow(a: list[int], e: int, p: int) -> list[int]:
    out = [1] + [0] * (len(a) - 1)
    while e:
        if e & 1:
            out = _ser_mul(out, a, p)
        a = _ser_mul(a, a, p)
        e >>= 1
    return out


def _ser_inv(a: list[int], p: int) -> list[int]:
    if a[0] % p == 0:
        raise SingularEvaluation("series with zero constant term is not invertible")
    D = len(a)
    inv0 = pow(a[0], -1, p)
    out = [inv0] + [0] * (D - 1)
    for k in range(1, D):
        s = sum(a[i] * out[k - i] for i in range(1, k + 1))
        out[k] = -s * inv0 % p
    return out


def _ser_eval(P: BiPoly, X: list[int], Y: list[int], p: int) -> list[int]:
    D = len(X)
    acc = [0] * D
    for j in range(P.c.shape[1] - 1, -1, -1):
        cx = [0] * D
        for i in range(P.c.shape[0] - 1, -1, -1):
            cx = _ser_mul(cx, X, p)
            cx[0] = (cx[0] + int(P.c[i, j])) % p
        acc = [(u + w) % p for u, w in zip(_ser_mul(acc, Y, p), cx)]
    return acc


def curve_jet(P: BiPoly, x0: int, y0: int, order: int) -> list[int]:
    """Taylor coefficients of the branch y(x0 + e) of P = 0 through (x0, y0)."""
    p = P.p
    Py = partial(P, "y")
    X = [x0 % p, 1] + [0] * (order - 2) if order >= 2 else [x0 % p]
    Y = [y0 % p] + [0] * (order - 1)
    if Py(x0, y0) == 0:
        raise SingularEvaluation(f"dP/dy vanishes at ({x0}, {y0})")
    for _ in range(max(1, order).bit_length() + 1):
        num = _ser_eval(P, X, Y, p)
        den = _ser_eval(Py, X, Y, p)
        step = _ser_mul(num, _ser_inv(den, p), p)
        Y = [(u - w) % p for u, w in zip(Y, step)]
    return Y


def chain_rule_values(P: BiPoly, lam, params: StepanovParams, x0: int, y0: int) -> list[int]:
    """T_k = (d/dx)^k Psi along the curve at (x0, y0), for k < D."""
    p = P.p
    D, t = params.D, params.t
    X = [x0 % p, 1] + [0] * (D - 2) if D >= 2 else [x0 % p]
    Y = curve_jet(P, x0, y0, D)
    Xt, Yt = _ser_pow(X, t, p), _ser_pow(Y, t, p)
    Xa = [_ser_pow(X, a, p) for a in range(params.A)]
    Xtb = [_ser_pow(Xt, b, p) for b in range(params.B)]
    Ytc = [_ser_pow(Yt, c, p) for c in range(params.C)]
    cols = column_order(params)
    by_ab: dict[tuple[int, int], list[int]] = {}
    for (a, b, c), v in zip(cols.tolist(), np.asarray(lam).tolist()):
        if v:
            acc = by_ab.setdefault((a, b), [0] * D)
            for i, w in enumerate(Ytc[c]):
                acc[i] += v * w
    total = [0] * D
    for (a, b), s in by_ab.items():
        term = _ser_mul(_ser_mul(Xa[a], Xtb[b], p), [v % p for v in s], p)
        total = [(u + w) % p for u, w in zip(total, term)]
    return [total[k] * math.factorial(k) % p for k in range(D)]


def assembled_values(P: BiPoly, lam, params: StepanovParams, gamma1: int, gamma2: int, x0: int, y0: int) -> list[int]:
    """R_k(x0, y0) for k < D, from the operator polynomials and lam."""
    p = P.p
    t, D = params.t, params.D
    cols = column_order(params)
    lam = np.asarray(lam, dtype=np.int64)
    nz = lam != 0
    a, b, c = cols[nz, 0], cols[nz, 1], cols[nz, 2]
    alpha = (a + b * (t % p)) % p
    beta = c * (t % p) % p
    apow, bpow = _powers(alpha, D, p), _powers(beta, D, p)
    w = lam[nz] * _powers(np.array([x0 % p]), params.A, p)[0][a] % p
    w = w * _powers(np.array([gamma1 % p]), params.B, p)[0][b] % p
    w = w * _powers(np.array([gamma2 % p]), params.C, p)[0][c] % p
    out = []
    for W in operator_families(P, D - 1):
        I, J, Xn, Yn = W.shape
        xp = _powers(np.array([x0 % p]), Xn, p)[0]
        yp = _powers(np.array([y0 % p]), Yn, p)[0]
        E = matmul_mod(matmul_mod(W.reshape(I * J, Xn, Yn), yp.reshape(Yn, 1), p)[..., 0], xp.reshape(Xn, 1), p)
        E = E.reshape(I, J)
        per_col = matmul_mod(apow[:, :I], E, p) * bpow[:, :J] % p
        vals = per_col.sum(axis=1) % p
        out.append(int(matmul_mod(w.reshape(1, -1), vals.reshape(-1, 1), p)[0, 0]))
    return out


def verify_certificate(cert: StepanovCertificate, P: BiPoly, c1, c2, solutions) -> bool:
    """Check D_k Psi = 0 at every regular coset point, two independent ways.

    ``c1``/``c2`` may be single cosets or parallel lists (family
    certificates).  A point is checked against the coset pair containing it.
    """
    c1s = c1 if isinstance(c1, (list, tuple)) else [c1]
    c2s = c2 if isinstance(c2, (list, tuple)) else [c2]
    p = P.p
    params = cert.params
    D = params.D
    Py = partial(P, "y")
    for x0, y0 in solutions:
        if P(x0, y0) != 0:
            raise ValueError(f"({x0}, {y0}) is not on the curve")
        home = next(((a, b) for a, b in zip(c1s, c2s) if x0 in a and y0 in b), None)
        if home is None:
            raise ValueError(f"({x0}, {y0}) lies in none of the coset pairs")
        if x0 % p == 0 or y0 % p == 0 or Py(x0, y0) == 0:
            continue
        assembled = assembled_values(P, cert.lam, params, home[0].gamma, home[1].gamma, x0, y0)
        oracle = chain_rule_values(P, cert.lam, params, x0, y0)
        r1 = Py(x0, y0)
        for k in range(D):
            scale = 1 if k == 0 else pow(r1, 2 * k - 1, p) * pow(x0 * y0, k, p) % p
            if assembled[k] != oracle[k] * scale % p or assembled[k] != 0:
                return False
    return True


def certificate_from_text(text: str) -> tuple[StepanovCertificate, BiPoly, list[Coset], list[Coset]]:
    """Rebuild a certificate and its instance from serialized text."""
    from .ffield import FieldCtx, subgroup_of_order

    cert = StepanovCertificate.from_json(text)
    ctx = FieldCtx(cert.p)
    P = parse_poly(cert.poly, ctx)
    G = subgroup_of_order(ctx, cert.params.t)
    return cert, P, [Coset(g1, G) for g1, _ in cert.cosets], [Coset(g2, G) for _, g2 in cert.cosets]
