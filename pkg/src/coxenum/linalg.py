"""Exact symmetric linear algebra: inertia, determinants, principal minors.

Works over any field-like elements supporting +, -, *, /, is_zero() and
sign() (Q235 or tower extensions from `field`).
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Q235


@dataclass(frozen=True)
class Signature:
    pos: int
    neg: int
    zero: int

    @property
    def size(self) -> int:
        return self.pos + self.neg + self.zero

    def as_pair(self):
        return (self.pos, self.neg)


def _sign(x) -> int:
    if isinstance(x, (int,)):
        return (x > 0) - (x < 0)
    return x.sign()


def _is_zero(x) -> bool:
    if isinstance(x, int):
        return x == 0
    return x.is_zero()


def inertia(M) -> Signature:
    """Exact signature of a symmetric matrix by congruence elimination.

    Zero diagonal pivots are handled by the congruence e_i -> e_i + e_j,
    which turns an off-diagonal pivot pair into a nonzero diagonal entry;
    a fully zero active block contributes to the corank.
    """
    n = len(M)
    A = [row[:] for row in M]
    active = list(range(n))
    pos = neg = zero = 0
    while active:
        k = next((i for i in active if not _is_zero(A[i][i])), None)
        if k is None:
            pair = None
            for ii, i in enumerate(active):
                for j in active[ii + 1:]:
                    if not _is_zero(A[i][j]):
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                zero += len(active)
                break
            i, j = pair
            # congruence: row/col i += row/col j  (A[i][i] becomes 2*A[i][j])
            for t in active:
                A[i][t] = A[i][t] + A[j][t]
            for t in active:
                A[t][i] = A[t][i] + A[t][j]
            k = i
        p = A[k][k]
        s = _sign(p)
        if s > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        inv_p = 1 / p if isinstance(p, int) else p.inverse()
        col = {i: A[i][k] for i in active}
        for i in active:
            ci = col[i]
            if _is_zero(ci):
                continue
            f = ci * inv_p
            for j in active:
                A[i][j] = A[i][j] - f * A[k][j]
        for i in active:
            A[i][k] = A[k][i] = p * 0
    return Signature(pos, neg, zero)


def det(M):
    """Exact determinant by Gaussian elimination with division."""
    n = len(M)
    if n == 0:
        return Q235.one()
    A = [row[:] for row in M]
    zero = A[0][0] * 0
    result = zero + 1
    sign_flips = 0
    for k in range(n):
        piv = None
        for i in range(k, n):
            if not _is_zero(A[i][k]):
                piv = i
                break
        if piv is None:
            return zero
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign_flips ^= 1
        p = A[k][k]
        result = result * p
        inv_p = p.inverse() if not isinstance(p, int) else 1 / p
        for i in range(k + 1, n):
            if _is_zero(A[i][k]):
                continue
            f = A[i][k] * inv_p
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - f * A[k][j]
    if sign_flips:
        result = -result
    return result


def submatrix(M, rows, cols=None):
    cols = rows if cols is None else cols
    return [[M[i][j] for j in cols] for i in rows]


def principal_minor(M, index_set):
    """Exact determinant of the principal submatrix on `index_set`."""
    idx = sorted(index_set)
    return det(submatrix(M, idx))


def is_positive_definite(M) -> bool:
    """Sylvester test via leading principal minors (exact)."""
    n = len(M)
    A = [row[:] for row in M]
    # elimination-based: PD iff all pivots positive without row exchange
    for k in range(n):
        p = A[k][k]
        if _sign(p) <= 0:
            return False
        inv_p = p.inverse() if not isinstance(p, int) else 1 / p
        for i in range(k + 1, n):
            if _is_zero(A[i][k]):
                continue
            f = A[i][k] * inv_p
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - f * A[k][j]
    return True


def is_positive_semidefinite(M) -> bool:
    sig = inertia(M)
    return sig.neg == 0


def charpoly_trailing_coeffs(M):
    """(c0, c1) with det(x I - M) = x^n - ... + c1 x + c0.

    c0 = (-1)^n det(M); c1 = (-1)^(n-1) * sum of principal (n-1)-minors.
    Only these two are needed for the signature shortcut test.
    """
    n = len(M)
    d = det(M)
    s = None
    for drop in range(n):
        idx = [i for i in range(n) if i != drop]
        m = det(submatrix(M, idx))
        s = m if s is None else s + m
    c0 = d if n % 2 == 0 else -d
    c1 = s if (n - 1) % 2 == 0 else -s
    return c0, c1
