# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact linear algebra kernels.

Drop-in replacement for perfx._linalg_py.  GF(p) elimination runs on C
int64 (p < 2**31, so products fit in 63 bits); the integer Bareiss
rank keeps Python bignums but with typed loops.
"""

from libc.stdlib cimport malloc, free

BACKEND = "cython"


cdef long long _inv_mod(long long a, long long p):
    cdef long long lo = 0, hi = 1, q, r0 = p, r1 = a % p, t
    if r1 < 0:
        r1 += p
    while r1:
        q = r0 / r1
        t = r0 - q * r1; r0 = r1; r1 = t
        t = lo - q * hi; lo = hi; hi = t
    lo = lo % p
    if lo < 0:
        lo += p
    return lo


def rref_modp(rows, long long p):
    """Row-reduce over GF(p).  Returns (rref_rows, pivot_columns)."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if m else 0
    cdef Py_ssize_t i, j, c, r, pivot
    cdef long long inv, f
    cdef long long *a
    if m == 0 or n == 0:
        return [list(row) for row in rows], []
    a = <long long *> malloc(m * n * sizeof(long long))
    if a == NULL:
        raise MemoryError
    try:
        for i in range(m):
            row = rows[i]
            for j in range(n):
                a[i * n + j] = row[j] % p
                if a[i * n + j] < 0:
                    a[i * n + j] += p
        pivots = []
        r = 0
        for c in range(n):
            pivot = -1
            for i in range(r, m):
                if a[i * n + c]:
                    pivot = i
                    break
            if pivot < 0:
                continue
            if pivot != r:
                for j in range(n):
                    a[r * n + j], a[pivot * n + j] = a[pivot * n + j], a[r * n + j]
            inv = _inv_mod(a[r * n + c], p)
            for j in range(c, n):
                a[r * n + j] = (a[r * n + j] * inv) % p
                if a[r * n + j] < 0:
                    a[r * n + j] += p
            for i in range(m):
                if i != r and a[i * n + c]:
                    f = a[i * n + c]
                    for j in range(c, n):
                        a[i * n + j] = (a[i * n + j] - f * a[r * n + j]) % p
                        if a[i * n + j] < 0:
                            a[i * n + j] += p
            pivots.append(c)
            r += 1
            if r == m:
                break
        out = [[a[i * n + j] for j in range(n)] for i in range(m)]
        return out, pivots
    finally:
        free(a)


def rank_modp(rows, long long p):
    if not rows or not rows[0]:
        return 0
    return len(rref_modp(rows, p)[1])


def nullspace_modp(rows, long long p):
    """Right-kernel basis over GF(p), one vector per free column."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if m else 0
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    red, pivots = rref_modp(rows, p)
    pivot_set = set(pivots)
    basis = []
    cdef Py_ssize_t free_col, r
    for free_col in range(n):
        if free_col in pivot_set:
            continue
        v = [0] * n
        v[free_col] = 1
        for r in range(len(pivots)):
            v[pivots[r]] = (-red[r][free_col]) % p
        basis.append(v)
    return basis


def rank_int(rows):
    """Rank of an integer matrix by fraction-free Bareiss elimination."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if m else 0
    if m == 0 or n == 0:
        return 0
    a = [list(row) for row in rows]
    cdef Py_ssize_t i, j, c, r, pivot
    cdef Py_ssize_t rank = 0
    prev = 1
    r = 0
    for c in range(n):
        pivot = -1
        for i in range(r, m):
            if a[i][c]:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            a[r], a[pivot] = a[pivot], a[r]
        arc = a[r][c]
        row_r = a[r]
        for i in range(r + 1, m):
            row_i = a[i]
            aic = row_i[c]
            for j in range(c, n):
                row_i[j] = (arc * row_i[j] - aic * row_r[j]) // prev
        prev = arc
        rank += 1
        r += 1
        if r == m:
            break
    return rank
