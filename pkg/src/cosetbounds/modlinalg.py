"""Dense exact linear algebra over F_p.

Elimination runs in numba kernels.  For p < 2**26 the working copy is
float64: a product of two residues is below 2**52, so the fused
multiply-subtract is exact and one floor-based reduction brings it back to
[0, p).  Larger moduli use int64 with a ``%`` per update (residues are below
2**31, products below 2**62).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .ffield import FieldCtx

MAX_ENTRIES = 10**8
FLOAT_MODULUS_LIMIT = 2**26


class MatrixTooLarge(OverflowError):
    pass


@dataclass(frozen=True, eq=False)
class MatFp:
    ctx: FieldCtx
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        if e.size > MAX_ENTRIES:
            raise MatrixTooLarge(f"{e.shape[0]}x{e.shape[1]} exceeds {MAX_ENTRIES} entries")
        object.__setattr__(self, "entries", np.ascontiguousarray(e, dtype=np.int64) % self.ctx.p)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @classmethod
    def from_rows(cls, ctx: FieldCtx, rows) -> "MatFp":
        return cls(ctx, np.array(rows, dtype=object).astype(np.int64) if len(rows) else np.zeros((0, 0), np.int64))


@numba.njit(cache=True)
def _inv_mod(a, p):
    e = p - 2
    res = 1
    b = a % p
    while e > 0:
        if e & 1:
            res = res * b % p
        b = b * b % p
        e >>= 1
    return res


@numba.njit(cache=True)
def _echelon_float(M, p, stop_at_free):
    rows, cols = M.shape
    pf = float(p)
    pinv = 1.0 / pf
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    free = -1
    for j in range(cols):
        if r == rows:
            if free < 0:
                free = j
            break
        piv = -1
        for i in range(r, rows):
            if M[i, j] != 0.0:
                piv = i
                break
        if piv < 0:
            if free < 0:
                free = j
            if stop_at_free:
                break
            continue
        if piv != r:
            for c in range(cols):
                tmp = M[r, c]
                M[r, c] = M[piv, c]
                M[piv, c] = tmp
        inv = float(_inv_mod(np.int64(M[r, j]), np.int64(p)))
        prow = M[r]
        for c in range(j, cols):
            x = prow[c] * inv
            x -= np.floor(x * pinv) * pf
            if x < 0.0:
                x += pf
            elif x >= pf:
                x -= pf
            prow[c] = x
        for i in range(r + 1, rows):
            f = M[i, j]
            if f != 0.0:
                row = M[i]
                for c in range(j, cols):
                    x = row[c] - f * prow[c]
                    x -= np.floor(x * pinv) * pf
                    if x < 0.0:
                        x += pf
                    elif x >= pf:
                        x -= pf
                    row[c] = x
        pivots[r] = j
        r += 1
    return r, pivots[:r], free


@numba.njit(cache=True)
def _echelon_int(M, p, stop_at_free):
    rows, cols = M.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    free = -1
    for j in range(cols):
        if r == rows:
            if free < 0:
                free = j
            break
        piv = -1
        for i in range(r, rows):
            if M[i, j] != 0:
                piv = i
                break
        if piv < 0:
            if free < 0:
                free = j
            if stop_at_free:
                break
            continue
        if piv != r:
            for c in range(cols):
                tmp = M[r, c]
                M[r, c] = M[piv, c]
                M[piv, c] = tmp
        inv = _inv_mod(M[r, j], p)
        prow = M[r]
        for c in range(j, cols):
            prow[c] = prow[c] * inv % p
        for i in range(r + 1, rows):
            f = M[i, j]
            if f != 0:
                row = M[i]
                for c in range(j, cols):
                    row[c] = (row[c] - f * prow[c]) % p
        pivots[r] = j
        r += 1
    return r, pivots[:r], free


@numba.njit(cache=True)
def _back_substitute(E, p, free):
    # columns 0..free-1 are pivots of rows 0..free-1 (unit diagonal)
    v = np.zeros(free + 1, dtype=np.int64)
    v[free] = 1
    for i in range(free - 1, -1, -1):
        acc = 0
        for j in range(i + 1, free + 1):
            if v[j] != 0 and E[i, j] != 0:
                acc = (acc + E[i, j] * v[j]) % p
        v[i] = (p - acc) % p
    return v


def _echelon(A: np.ndarray, p: int, stop_at_free: bool):
    """Row-echelon form of a copy of A; returns (E, rank, pivots, first_free)."""
    if p < FLOAT_MODULUS_LIMIT:
        W = A.astype(np.float64)
        r, piv, free = _echelon_float(W, p, stop_at_free)
        return W.astype(np.int64), r, piv, free
    W = A.astype(np.int64).copy()
    r, piv, free = _echelon_int(W, np.int64(p), stop_at_free)
    return W, r, piv, free


def rank(M: MatFp) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return int(_echelon(M.entries, M.ctx.p, False)[1])


def nullspace_vector(M: MatFp) -> np.ndarray | None:
    """A nonzero kernel vector whose first nonzero entry is 1, or None.

    The vector sets the first non-pivot column to 1 and the later free
    columns to 0.  Only the leading ``nonzero_rows + 1`` columns can contain
    that column, so elimination is restricted to them; the result is the
    same as eliminating the whole matrix.
    """
    p = M.ctx.p
    cols = M.cols
    if cols == 0:
        return None
    A = M.entries[M.entries.any(axis=1)] if M.rows else M.entries
    width = min(cols, A.shape[0] + 1)
    if A.shape[0] == 0:
        v = np.zeros(cols, dtype=np.int64)
        v[0] = 1
        return v
    E, r, _, free = _echelon(np.ascontiguousarray(A[:, :width]), p, True)
    if free < 0:
        return None
    head = _back_substitute(E, np.int64(p), int(free))
    v = np.zeros(cols, dtype=np.int64)
    v[: free + 1] = head
    lead = int(v[np.nonzero(v)[0][0]])
    return v * pow(lead, -1, p) % p


def matvec(M: MatFp, v) -> np.ndarray:
    """Exact M @ v mod p (chunked so int64 partial sums cannot overflow)."""
    p = M.ctx.p
    v = np.asarray(v, dtype=np.int64) % p
    chunk = max(1, (2**63 - 1) // ((p - 1) ** 2 + 1) - 1)
    out = np.zeros(M.rows, dtype=np.int64)
    for s in range(0, M.cols, chunk):
        out = (out + M.entries[:, s : s + chunk] @ v[s : s + chunk]) % p
    return out


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) mod p for residue matrices.

    Uses float64 BLAS when every partial sum stays below 2**53, int64
    otherwise; the inner dimension is chunked to keep sums exact.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[-1]
    sq = (p - 1) ** 2
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    if inner == 0:
        return out
    fchunk = (2**53) // max(sq, 1)
    if fchunk >= 1:
        Af, Bf = A.astype(np.float64), B.astype(np.float64)
        for s in range(0, inner, fchunk):
            part = Af[..., s : s + fchunk] @ Bf[s : s + fchunk]
            out = (out + np.fmod(part, p).astype(np.int64)) % p
        return out
    ichunk = max(1, (2**63 - 1) // sq - 1)
    for s in range(0, inner, ichunk):
        out = (out + A[..., s : s + ichunk] @ B[s : s + ichunk]) % p
    return out
