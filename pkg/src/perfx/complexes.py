"""Bounded complexes of finite free modules.

Cohomological indexing: the differential d^i maps term i to term i+1
and is stored as a matrix with rank(i+1) rows and rank(i) columns.
d o d = 0 is checked at construction.  Sign conventions are fixed once
(see docs/conventions.md): Koszul d(e_S) contracts with alternating
signs, tensor differentials carry (-1)^p on the right factor, Hom uses
d(f) = d o f - (-1)^n f o d, shifts negate odd differentials.

The tail flag describes degrees below the window: 'zero' (the complex
really stops), 'exact' (a truncated resolution: homology below and at
the floor is not represented) or 'unknown'.
"""

from __future__ import annotations

from itertools import combinations

from . import linalg
from .modules import ModulePresentation, _column_degrees
from .rings import Mat, syzygy_matrix

ZERO_BELOW = "zero"
EXACT_BELOW = "exact"
UNKNOWN_BELOW = "unknown"

RANK_CAP = 20000


class FreeComplex:
    __slots__ = ("ring", "lo", "hi", "ranks", "diffs", "degrees", "tail")

    def __init__(self, ring, ranks, diffs, degrees=None, tail=ZERO_BELOW, check=True):
        self.ring = ring
        self.ranks = {i: r for i, r in ranks.items() if r}
        if self.ranks:
            self.lo = min(self.ranks)
            self.hi = max(self.ranks)
        else:
            self.lo, self.hi = 0, -1
        total = sum(self.ranks.values())
        if total > RANK_CAP:
            raise ValueError(
                f"complex too large: total rank {total} exceeds cap {RANK_CAP}"
            )
        self.diffs = {}
        for i, m in diffs.items():
            if self.rank(i) and self.rank(i + 1) and not m.is_zero:
                self.diffs[i] = m
        self.degrees = None
        if degrees is not None:
            self.degrees = {
                i: tuple(degrees[i]) for i in self.ranks if i in degrees
            }
            if set(self.degrees) != set(self.ranks):
                raise ValueError("graded complex needs degrees for every term")
        self.tail = tail
        if check:
            self._validate()

    def _validate(self):
        for i, m in self.diffs.items():
            if m.nrows != self.rank(i + 1) or m.ncols != self.rank(i):
                raise ValueError(f"differential at {i} has wrong shape")
            if m.ring != self.ring:
                raise ValueError("differential over wrong ring")
        for i in self.diffs:
            if (i + 1) in self.diffs:
                prod = self.diffs[i + 1] * self.diffs[i]
                if not prod.is_zero:
                    raise ValueError(f"d o d != 0 between degrees {i} and {i + 2}")
        if self.degrees is not None:
            for i, m in self.diffs.items():
                src = self.degrees[i]
                tgt = self.degrees.get(i + 1, ())
                for r in range(m.nrows):
                    for c in range(m.ncols):
                        p = m.rows[r][c]
                        if p.is_zero:
                            continue
                        d = p.homogeneous_degree()
                        if d is None or d != src[c] - tgt[r]:
                            raise ValueError(
                                f"differential entry at degree {i} not homogeneous"
                            )

    # -- basic access ----------------------------------------------------

    def rank(self, i):
        return self.ranks.get(i, 0)

    def diff(self, i):
        if i in self.diffs:
            return self.diffs[i]
        return Mat.zero(self.ring, self.rank(i + 1), self.rank(i))

    def term_degrees(self, i):
        if self.degrees is None:
            return None
        return self.degrees.get(i, ())

    @property
    def is_graded(self):
        return self.degrees is not None

    @property
    def is_bounded(self):
        return self.tail == ZERO_BELOW

    def homology_floor(self):
        """Lowest degree where homology is determined by the window."""
        return self.lo if self.tail == ZERO_BELOW else self.lo + 1

    def euler_characteristic(self):
        if not self.is_bounded:
            raise ValueError("Euler characteristic needs a genuinely bounded complex")
        return sum((-1 if i % 2 else 1) * r for i, r in self.ranks.items())

    def total_rank(self):
        return sum(self.ranks.values())

    @classmethod
    def zero_complex(cls, ring):
        return cls(ring, {}, {})

    @classmethod
    def single(cls, ring, rank, at=0, degrees=None):
        degs = None if degrees is None else {at: tuple(degrees)}
        return cls(ring, {at: rank}, {}, degrees=degs)

    @classmethod
    def from_matrix(cls, ring, mat, at=-1, degrees=None):
        """Two-term complex [source -> target] with the source at `at`."""
        ranks = {at: mat.ncols, at + 1: mat.nrows}
        return cls(ring, ranks, {at: mat}, degrees=degrees)

    def __repr__(self):
        if not self.ranks:
            return "FreeComplex(0)"
        parts = [f"{i}:{self.rank(i)}" for i in range(self.lo, self.hi + 1)]
        tail = "" if self.tail == ZERO_BELOW else f", tail={self.tail}"
        return f"FreeComplex({', '.join(parts)}{tail} over {self.ring})"

    def __eq__(self, other):
        """Structural identity: same ranks, differentials and grading."""
        return (
            isinstance(other, FreeComplex)
            and self.ring == other.ring
            and self.ranks == other.ranks
            and self.diffs == other.diffs
            and self.degrees == other.degrees
            and self.tail == other.tail
        )

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.ranks.items())), self.tail))

    # -- homology and fibers ----------------------------------------------

    def homology(self, i):
        """H^i as a ModulePresentation (quotient-ring aware)."""
        floor = self.homology_floor()
        if i < floor:
            if self.tail == ZERO_BELOW:
                return ModulePresentation.zero(self.ring)
            raise ValueError(
                f"homology at {i} not determined below degree {floor} (tail {self.tail})"
            )
        if self.rank(i) == 0:
            return ModulePresentation.zero(self.ring)
        d_i = self.diff(i)
        if self.rank(i + 1) == 0:
            kernel = Mat.identity(self.ring, self.rank(i))
        else:
            kernel = syzygy_matrix(d_i)
        if kernel.ncols == 0:
            return ModulePresentation.zero(self.ring)
        d_prev = self.diff(i - 1)
        combined = kernel.hstack(d_prev) if d_prev.ncols else kernel
        rel_all = syzygy_matrix(combined)
        relations = rel_all.select_rows(range(kernel.ncols))
        degrees = None
        if self.degrees is not None:
            degrees = _column_degrees(kernel, self.degrees[i])
        return ModulePresentation(self.ring, kernel.ncols, relations, degrees)

    def fiber_dims(self, point, lo=None, hi=None):
        """Homology dimensions of the complex evaluated at a point.

        Returns {degree: dim over kappa(point)} on the trustworthy
        window (degrees >= homology floor).
        """
        field = self.ring.field
        floor = self.homology_floor()
        lo = floor if lo is None else max(lo, floor)
        hi = self.hi if hi is None else hi
        ranks_of_diff = {}
        for i in range(lo - 1, hi + 1):
            m = self.diff(i)
            if m.nrows == 0 or m.ncols == 0:
                ranks_of_diff[i] = 0
            else:
                ranks_of_diff[i] = linalg.rank(m.evaluate(point), field)
        out = {}
        for i in range(lo, hi + 1):
            h = self.rank(i) - ranks_of_diff.get(i, 0) - ranks_of_diff.get(i - 1, 0)
            out[i] = h
        return out

    def fiber_euler_characteristic(self, point):
        if not self.is_bounded:
            raise ValueError("chi needs a bounded complex")
        dims = self.fiber_dims(point)
        return sum((-1 if i % 2 else 1) * d for i, d in dims.items())

    # -- constructions -----------------------------------------------------

    def shift(self, n):
        """C[n] with C[n]^i = C^(n+i); odd shifts negate differentials."""
        ranks = {i - n: r for i, r in self.ranks.items()}
        sign = -1 if n % 2 else 1
        diffs = {}
        for i, m in self.diffs.items():
            diffs[i - n] = m if sign == 1 else -m
        degrees = None
        if self.degrees is not None:
            degrees = {i - n: d for i, d in self.degrees.items()}
        return FreeComplex(self.ring, ranks, diffs, degrees, self.tail, check=False)

    def direct_sum(self, other):
        _same_ring(self, other)
        ranks = {}
        for i in set(self.ranks) | set(other.ranks):
            ranks[i] = self.rank(i) + other.rank(i)
        diffs = {}
        for i in set(self.diffs) | set(other.diffs):
            a, b = self.diff(i), other.diff(i)
            top = a.hstack(Mat.zero(self.ring, a.nrows, b.ncols))
            bot = Mat.zero(self.ring, b.nrows, a.ncols).hstack(b)
            diffs[i] = top.vstack(bot)
        degrees = None
        if self.degrees is not None and other.degrees is not None:
            degrees = {
                i: tuple(self.term_degrees(i) or ()) + tuple(other.term_degrees(i) or ())
                for i in ranks
            }
        tail = _combine_tails(self.tail, other.tail)
        return FreeComplex(self.ring, ranks, diffs, degrees, tail, check=False)


def _same_ring(c, d):
    if c.ring != d.ring:
        raise ValueError("complexes over different rings")


def _combine_tails(a, b):
    for t in (UNKNOWN_BELOW, EXACT_BELOW):
        if a == t or b == t:
            return t
    return ZERO_BELOW


def fiber_homology_dims(complex_, point, lo=None, hi=None):
    """Homology dimensions of the complex evaluated at a rational point."""
    return complex_.fiber_dims(point, lo=lo, hi=hi)


def unit_complex(ring):
    return FreeComplex.single(ring, 1, at=0, degrees=(0,))


# -- Koszul complexes ----------------------------------------------------


def koszul(ring, elements):
    """Exterior-algebra complex on a sequence, in degrees [-r, 0].

    d(e_S) = sum over k in S of (-1)^(index of k in S) t_k e_(S minus k).
    """
    elems = [ring.parse(t) if isinstance(t, str) else t for t in elements]
    if not elems:
        raise ValueError("koszul needs a nonempty sequence")
    r = len(elems)
    subsets = {
        i: list(combinations(range(r), i)) for i in range(r + 1)
    }
    index = {i: {s: j for j, s in enumerate(subsets[i])} for i in subsets}
    ranks = {-i: len(subsets[i]) for i in range(r + 1)}
    diffs = {}
    for i in range(1, r + 1):
        # d^{-i}: term -i (subsets of size i) -> term -i+1 (size i-1)
        rows = [[ring.zero] * len(subsets[i]) for _ in range(len(subsets[i - 1]))]
        for col, s in enumerate(subsets[i]):
            for pos, k in enumerate(s):
                target = tuple(x for x in s if x != k)
                row = index[i - 1][target]
                coeff = elems[k] if pos % 2 == 0 else -elems[k]
                rows[row][col] = rows[row][col] + coeff
        diffs[-i] = Mat(ring, rows, ncols=len(subsets[i]))
    degrees = None
    degs = [t.homogeneous_degree() for t in elems]
    if all(d is not None for d in degs):
        degrees = {
            -i: tuple(sum(degs[k] for k in s) for s in subsets[i])
            for i in range(r + 1)
        }
    return FreeComplex(ring, ranks, diffs, degrees)


def koszul_resolution_of_point(ring, point):
    """Koszul complex on (x_i - a_i): resolves kappa(point) over a
    plain polynomial ring, window [-n, 0]."""
    gens = [ring.var(i) - ring.const(point.coords[i]) for i in range(ring.nvars)]
    if not gens:
        return unit_complex(ring)
    return koszul(ring, gens)


def two_term(ring, element):
    """[R -> R] in degrees 0, 1 with the map multiplication by element."""
    element = ring.parse(element) if isinstance(element, str) else element
    d = element.homogeneous_degree()
    degrees = {0: (0,), 1: (-d,)} if d is not None else None
    return FreeComplex(
        ring, {0: 1, 1: 1}, {0: Mat(ring, [[element]], ncols=1)}, degrees
    )


# -- tensor, hom, dual ---------------------------------------------------


def _basis_layout(c, d, n):
    """Index layout of (C (x) D)^n: list of (p, q, i, j) in fixed order."""
    layout = []
    for p in range(c.lo, c.hi + 1):
        q = n - p
        rc, rd = c.rank(p), d.rank(q)
        for i in range(rc):
            for j in range(rd):
                layout.append((p, q, i, j))
    return layout


def tensor(c, d):
    """Total complex of the double complex C (x) D, standard signs."""
    _same_ring(c, d)
    ring = c.ring
    if not c.ranks or not d.ranks:
        return FreeComplex.zero_complex(ring)
    lo, hi = c.lo + d.lo, c.hi + d.hi
    layouts = {n: _basis_layout(c, d, n) for n in range(lo, hi + 2)}
    offsets = {
        n: {key: idx for idx, key in enumerate(layout)}
        for n, layout in layouts.items()
    }
    ranks = {n: len(layouts[n]) for n in layouts if layouts[n]}
    diffs = {}
    for n in range(lo, hi + 1):
        src, tgt = layouts[n], layouts[n + 1]
        if not src or not tgt:
            continue
        rows = [[ring.zero] * len(src) for _ in range(len(tgt))]
        for col, (p, q, i, j) in enumerate(src):
            dc = c.diffs.get(p)
            if dc is not None:
                for r in range(dc.nrows):
                    entry = dc.rows[r][i]
                    if entry.is_zero:
                        continue
                    row = offsets[n + 1].get((p + 1, q, r, j))
                    if row is not None:
                        rows[row][col] = rows[row][col] + entry
            dd = d.diffs.get(q)
            if dd is not None:
                sign = -1 if p % 2 else 1
                for s in range(dd.nrows):
                    entry = dd.rows[s][j]
                    if entry.is_zero:
                        continue
                    row = offsets[n + 1].get((p, q + 1, i, s))
                    if row is not None:
                        rows[row][col] = rows[row][col] + (entry if sign == 1 else -entry)
        diffs[n] = Mat(ring, rows, ncols=len(src))
    degrees = None
    if c.degrees is not None and d.degrees is not None:
        degrees = {
            n: tuple(
                c.degrees[p][i] + d.degrees[q][j] for (p, q, i, j) in layouts[n]
            )
            for n in ranks
        }
    tail = _combine_tails(c.tail, d.tail)
    return FreeComplex(ring, ranks, diffs, degrees, tail)


def _hom_layout(c, d, n):
    layout = []
    for q in range(c.lo, c.hi + 1):
        if d.rank(q + n) == 0 or c.rank(q) == 0:
            continue
        for i in range(c.rank(q)):
            for j in range(d.rank(q + n)):
                layout.append((q, i, j))
    return layout


def hom_complex(c, d):
    """Hom(C, D): term n = products Hom(C^q, D^(q+n)).

    d(f) = d_D o f - (-1)^n f o d_C.  Basis element (q, i, j) is the map
    sending generator i of C^q to generator j of D^(q+n).
    """
    _same_ring(c, d)
    ring = c.ring
    if not c.ranks or not d.ranks:
        return FreeComplex.zero_complex(ring)
    lo = d.lo - c.hi
    hi = d.hi - c.lo
    layouts = {n: _hom_layout(c, d, n) for n in range(lo, hi + 2)}
    offsets = {
        n: {key: idx for idx, key in enumerate(layout)}
        for n, layout in layouts.items()
    }
    ranks = {n: len(layouts[n]) for n in layouts if layouts[n]}
    diffs = {}
    for n in range(lo, hi + 1):
        src, tgt = layouts[n], layouts.get(n + 1, [])
        if not src or not tgt:
            continue
        rows = [[ring.zero] * len(src) for _ in range(len(tgt))]
        sign = -1 if n % 2 else 1
        for col, (q, i, j) in enumerate(src):
            dd = d.diffs.get(q + n)
            if dd is not None:
                for s in range(dd.nrows):
                    entry = dd.rows[s][j]
                    if entry.is_zero:
                        continue
                    row = offsets[n + 1].get((q, i, s))
                    if row is not None:
                        rows[row][col] = rows[row][col] + entry
            # precomposition with d_C^{q-1}: lands in Hom(C^{q-1}, D^{q+n})
            dc = c.diffs.get(q - 1)
            if dc is not None:
                for ip in range(dc.ncols):
                    entry = dc.rows[i][ip]
                    if entry.is_zero:
                        continue
                    row = offsets[n + 1].get((q - 1, ip, j))
                    if row is not None:
                        term = entry if sign == -1 else -entry
                        rows[row][col] = rows[row][col] + term
        diffs[n] = Mat(ring, rows, ncols=len(src))
    degrees = None
    if c.degrees is not None and d.degrees is not None:
        degrees = {
            n: tuple(
                d.degrees[q + n][j] - c.degrees[q][i] for (q, i, j) in layouts[n]
            )
            for n in ranks
        }
    tail = UNKNOWN_BELOW if (c.tail != ZERO_BELOW or d.tail != ZERO_BELOW) else ZERO_BELOW
    return FreeComplex(ring, ranks, diffs, degrees, tail)


def dual(c):
    """RHom(C, R) for a bounded free complex: hom into the unit."""
    return hom_complex(c, unit_complex(c.ring))


# -- chain maps ----------------------------------------------------------


class ComplexMap:
    """Degreewise matrices commuting with the differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components, check=True):
        _same_ring(source, target)
        self.source = source
        self.target = target
        self.components = {
            i: m for i, m in components.items() if m.nrows and m.ncols
        }
        if check:
            self._validate()

    def _validate(self):
        for i, m in self.components.items():
            if m.nrows != self.target.rank(i) or m.ncols != self.source.rank(i):
                raise ValueError(f"component {i} has wrong shape")
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for i in range(lo, hi):
            left = self.target.diff(i) * self.component(i)
            right = self.component(i + 1) * self.source.diff(i)
            if left.rows != right.rows:
                raise ValueError(f"map does not commute with d at degree {i}")

    def component(self, i):
        if i in self.components:
            return self.components[i]
        return Mat.zero(self.source.ring, self.target.rank(i), self.source.rank(i))

    @classmethod
    def identity(cls, c):
        return cls(c, c, {i: Mat.identity(c.ring, r) for i, r in c.ranks.items()}, check=False)


def _map_preserves_grading(phi):
    c, d = phi.source, phi.target
    if c.degrees is None or d.degrees is None:
        return False
    for i, m in phi.components.items():
        src = c.term_degrees(i)
        tgt = d.term_degrees(i)
        for r in range(m.nrows):
            for col in range(m.ncols):
                p = m.rows[r][col]
                if p.is_zero:
                    continue
                deg = p.homogeneous_degree()
                if deg is None or deg != src[col] - tgt[r]:
                    return False
    return True


def cone(phi):
    """Mapping cone: cone^i = C^(i+1) (+) D^i, d = [[-d_C, 0], [phi, d_D]].

    The cone is graded only when the map itself is degree zero."""
    c, d = phi.source, phi.target
    ring = c.ring
    ranks = {}
    for i in set(d.ranks) | {k - 1 for k in c.ranks}:
        r = c.rank(i + 1) + d.rank(i)
        if r:
            ranks[i] = r
    diffs = {}
    for i in ranks:
        top = (-c.diff(i + 1)).hstack(Mat.zero(ring, c.rank(i + 2), d.rank(i)))
        bot = phi.component(i + 1).hstack(d.diff(i))
        m = top.vstack(bot)
        if m.nrows and m.ncols:
            diffs[i] = m
    degrees = None
    if _map_preserves_grading(phi):
        degrees = {
            i: tuple(c.term_degrees(i + 1) or ()) + tuple(d.term_degrees(i) or ())
            for i in ranks
        }
    tail = _combine_tails(c.tail, d.tail)
    return FreeComplex(ring, ranks, diffs, degrees, tail)


def tensor_map(phi, psi):
    """(phi (x) psi) for degree-0 chain maps; no signs involved."""
    cs, ct = phi.source, phi.target
    ds, dt = psi.source, psi.target
    src = tensor(cs, ds)
    tgt = tensor(ct, dt)
    ring = cs.ring
    comps = {}
    for n in range(src.lo, src.hi + 1):
        s_layout = _basis_layout(cs, ds, n)
        t_layout = _basis_layout(ct, dt, n)
        t_index = {key: idx for idx, key in enumerate(t_layout)}
        if not s_layout or not t_layout:
            continue
        rows = [[ring.zero] * len(s_layout) for _ in range(len(t_layout))]
        for col, (p, q, i, j) in enumerate(s_layout):
            mp = phi.component(p)
            mq = psi.component(q)
            if not (mp.nrows and mq.nrows):
                continue
            for r in range(mp.nrows):
                a = mp.rows[r][i]
                if a.is_zero:
                    continue
                for s in range(mq.nrows):
                    b = mq.rows[s][j]
                    if b.is_zero:
                        continue
                    row = t_index.get((p, q, r, s))
                    if row is not None:
                        rows[row][col] = rows[row][col] + a * b
        comps[n] = Mat(ring, rows, ncols=len(s_layout))
    return ComplexMap(src, tgt, comps)


# -- Koszul dual stages and towers ----------------------------------------


def koszul_dual_stage(ring, elements, s):
    """Stage s of the dual tower: tensor of [R -> R] with maps t_i^s.

    Returns (stage_complex, transition map to stage s+1): identity in
    factor-degree 0, multiplication by t_i in factor-degree 1.
    """
    if s < 1:
        raise ValueError("stages start at 1")
    elems = [ring.parse(t) if isinstance(t, str) else t for t in elements]
    stage = None
    nxt = None
    trans = None
    for t in elems:
        f_stage = two_term(ring, t**s)
        f_next = two_term(ring, t ** (s + 1))
        f_map = ComplexMap(
            f_stage,
            f_next,
            {0: Mat.identity(ring, 1), 1: Mat(ring, [[t]], ncols=1)},
        )
        if stage is None:
            stage, nxt, trans = f_stage, f_next, f_map
        else:
            stage_new = tensor(stage, f_stage)
            trans = tensor_map(trans, f_map)
            stage, nxt = stage_new, tensor(nxt, f_next)
    return stage, trans


class StageTower:
    """Finite stages of the direct system of dual Koszul complexes."""

    __slots__ = ("ring", "elements", "stages", "maps")

    def __init__(self, ring, elements, max_stage):
        self.ring = ring
        self.elements = [
            ring.parse(t) if isinstance(t, str) else t for t in elements
        ]
        self.stages = []
        self.maps = []
        for s in range(1, max_stage + 1):
            stage, trans = koszul_dual_stage(ring, self.elements, s)
            self.stages.append(stage)
            self.maps.append(trans)

    def stage(self, s):
        return self.stages[s - 1]

    def transition(self, s):
        return self.maps[s - 1]


# -- graded strands over the coefficient field ----------------------------


def standard_monomials(ring, degree):
    """Monomial basis of the degree-d piece of the (quotient) ring."""
    from .groebner import mono_divides

    lts = [q.leading_monomial() for q in ring.quotient_gb]
    return [
        m
        for m in ring.monomials_of_degree(degree)
        if not any(mono_divides(lt, m) for lt in lts)
    ]


def strand(complex_, d):
    """Degree-d strand of a graded complex as field matrices.

    Returns (dims, mats): dims[i] = dim of the strand of term i, and
    mats[i] the matrix of d^i on the strand (entries in the field).
    """
    if complex_.degrees is None:
        raise ValueError("strand extraction needs a graded complex")
    ring = complex_.ring
    field = ring.field
    bases = {}
    for i in range(complex_.lo, complex_.hi + 1):
        basis = []
        for j in range(complex_.rank(i)):
            for mono in standard_monomials(ring, d - complex_.degrees[i][j]):
                basis.append((j, mono))
        bases[i] = basis
    dims = {i: len(b) for i, b in bases.items()}
    mats = {}
    for i in range(complex_.lo, complex_.hi + 1):
        src = bases.get(i, [])
        tgt = bases.get(i + 1, [])
        if not src or not tgt:
            continue
        tgt_index = {key: idx for idx, key in enumerate(tgt)}
        m = complex_.diff(i)
        rows = [[field.zero] * len(src) for _ in range(len(tgt))]
        for col, (j, mono) in enumerate(src):
            if m.ncols == 0:
                continue
            for r in range(m.nrows):
                entry = m.rows[r][j]
                if entry.is_zero:
                    continue
                prod = ring.reduce_terms(
                    {
                        _mono_mul(mono, em): ec
                        for em, ec in entry.terms.items()
                    }
                )
                for pm, pc in prod.terms.items():
                    row = tgt_index.get((r, pm))
                    if row is not None:
                        rows[row][col] = field.add(rows[row][col], pc)
        mats[i] = rows
    return dims, mats


def _mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def strand_homology_dims(complex_, d, lo=None, hi=None):
    """Homology dimensions of the degree-d strand over the field."""
    field = complex_.ring.field
    dims, mats = strand(complex_, d)
    floor = complex_.homology_floor()
    lo = floor if lo is None else max(lo, floor)
    hi = complex_.hi if hi is None else hi
    rk = {}
    for i, rows in mats.items():
        rk[i] = linalg.rank(rows, field) if rows and rows[0] else 0
    out = {}
    for i in range(lo, hi + 1):
        out[i] = dims.get(i, 0) - rk.get(i, 0) - rk.get(i - 1, 0)
    return out


# -- minimization ---------------------------------------------------------


def minimize(complex_):
    """Split off unit (constant) entries of the differentials.

    Gaussian elimination on complexes: homotopy equivalence, preserves
    homology, fiber dimensions and graded strands.
    """
    ring = complex_.ring
    field = ring.field
    ranks = dict(complex_.ranks)
    diffs = {
        i: [list(row) for row in complex_.diff(i).rows] for i in complex_.diffs
    }
    degrees = (
        {i: list(d) for i, d in complex_.degrees.items()}
        if complex_.degrees is not None
        else None
    )

    def find_pivot():
        for i in sorted(diffs):
            m = diffs[i]
            for r in range(len(m)):
                for c in range(len(m[0]) if m else 0):
                    v = m[r][c].constant_value()
                    if v is not None and v != field.zero:
                        return i, r, c, v
        return None

    while True:
        hit = find_pivot()
        if hit is None:
            break
        i, r, c, u = hit
        m = diffs[i]
        inv = field.inv(u)
        nrows, ncols = len(m), len(m[0])
        new = []
        for a in range(nrows):
            if a == r:
                continue
            row = []
            for b in range(ncols):
                if b == c:
                    continue
                row.append(m[a][b] - m[a][c].scale(inv) * m[r][b])
            new.append(row)
        if new and new[0]:
            diffs[i] = new
        else:
            diffs.pop(i, None)
        ranks[i] = ranks.get(i, 0) - 1
        ranks[i + 1] = ranks.get(i + 1, 0) - 1
        if degrees is not None:
            degrees[i].pop(c)
            degrees[i + 1].pop(r)
        prev = diffs.get(i - 1)
        if prev is not None:
            for row_idx in (c,):
                prev.pop(row_idx)
            if not prev:
                diffs.pop(i - 1, None)
        nxt = diffs.get(i + 1)
        if nxt is not None:
            for row in nxt:
                row.pop(r)
            if nxt and not nxt[0]:
                diffs.pop(i + 1, None)
    mat_diffs = {}
    for i, m in diffs.items():
        if m and m[0]:
            mat_diffs[i] = Mat(ring, m, ncols=len(m[0]))
    final_ranks = {i: r for i, r in ranks.items() if r > 0}
    final_degrees = None
    if degrees is not None:
        final_degrees = {i: tuple(degrees[i]) for i in final_ranks}
    return FreeComplex(
        ring, final_ranks, mat_diffs, final_degrees, complex_.tail, check=False
    )
