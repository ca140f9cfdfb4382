"""Exact linear algebra over the coefficient fields.

The GF(p) elimination and the integer Bareiss rank are the hot kernels
of the whole engine (every fiber-dimension query, scan and strand
computation bottoms out here).  A compiled implementation is used when
available; set PERFX_PURE=1 to force the pure-Python fallback.
Rational matrices are handled by clearing denominators row by row
(row scaling changes neither rank nor right kernel).
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm

from . import _linalg_py

if os.environ.get("PERFX_PURE") == "1":
    _impl = _linalg_py
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _linalg_py

BACKEND = _impl.BACKEND

rank_modp = _impl.rank_modp
rref_modp = _impl.rref_modp
nullspace_modp = _impl.nullspace_modp
rank_int = _impl.rank_int


def _clear_denominators(rows):
    out = []
    for row in rows:
        denom = 1
        for x in row:
            if isinstance(x, Fraction):
                denom = lcm(denom, x.denominator)
        out.append([int(x * denom) if isinstance(x, Fraction) else x * denom for x in row])
    return out


def rank(rows, field):
    """Rank of a matrix with entries in the given field."""
    if not rows or not rows[0]:
        return 0
    if field.char == 0:
        return rank_int(_clear_denominators(rows))
    return rank_modp([[x % field.p for x in row] for row in rows], field.p)


def nullspace(rows, field):
    """Right-kernel basis; deterministic (one vector per free column)."""
    if field.char != 0:
        return [
            [v % field.p for v in vec]
            for vec in nullspace_modp([[x % field.p for x in row] for row in rows], field.p)
        ]
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(n)] for j in range(n)]
    red, pivots = rref_frac(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][free]
        basis.append(v)
    return basis


def rref_frac(rows):
    """Gauss-Jordan over QQ.  Returns (rref_rows, pivot_columns)."""
    a = [[Fraction(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rref(rows, field):
    if field.char == 0:
        return rref_frac(rows)
    red, pivots = rref_modp([[x % field.p for x in row] for row in rows], field.p)
    return red, pivots


def solve(rows, rhs, field):
    """One solution x of A x = b, or None.  A is rows, b a column list."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    red, pivots = rref(aug, field)
    if n in pivots:
        return None
    x = [field.zero] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    return x
