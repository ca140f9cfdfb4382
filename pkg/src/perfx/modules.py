"""Finitely presented modules as cokernels of matrices.

A presentation is coker(relations : R^s -> R^ambient_rank); optional
generator degrees make it graded.  Dimension queries (fibers at
rational points, graded pieces) reduce to exact linear algebra; the
canonical-form machinery is the module Gröbner basis of the relation
columns together with the quotient ideal block.
"""

from __future__ import annotations

from . import linalg
from .rings import Mat, MatrixGB, RationalPoint, evaluate_matrix, syzygy_matrix


class ModulePresentation:
    __slots__ = ("ring", "ambient_rank", "relations", "degrees", "_gb")

    def __init__(self, ring, ambient_rank, relations=None, degrees=None):
        self.ring = ring
        self.ambient_rank = ambient_rank
        if relations is None:
            relations = Mat.zero(ring, ambient_rank, 0)
        if relations.nrows != ambient_rank:
            raise ValueError("relation rows must match ambient rank")
        self.relations = relations
        if degrees is not None:
            degrees = tuple(degrees)
            if len(degrees) != ambient_rank:
                raise ValueError("one degree per ambient generator")
            _check_homogeneous_columns(relations, degrees)
        self.degrees = degrees
        self._gb = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def free(cls, ring, rank, degrees=None):
        return cls(ring, rank, Mat.zero(ring, rank, 0), degrees)

    @classmethod
    def zero(cls, ring):
        return cls(ring, 0, Mat.zero(ring, 0, 0), ())

    @classmethod
    def cyclic(cls, ring, ideal_gens, degrees=None):
        """R/(ideal_gens) as a presentation with one generator."""
        gens = [ring.parse(g) if isinstance(g, str) else g for g in ideal_gens]
        return cls(ring, 1, Mat(ring, [gens], ncols=len(gens)), degrees)

    @classmethod
    def residue_field(cls, ring, point=None):
        """kappa(point) presented over the ring (default: the origin)."""
        if point is None:
            point = RationalPoint(ring, (0,) * ring.nvars)
        gens = [ring.var(i) - ring.const(point.coords[i]) for i in range(ring.nvars)]
        degrees = (0,) if all(c == ring.field.zero for c in point.coords) else None
        return cls(ring, 1, Mat(ring, [gens], ncols=ring.nvars), degrees)

    # -- canonical data ----------------------------------------------------

    @property
    def gb(self):
        if self._gb is None:
            self._gb = MatrixGB(self.relations)
        return self._gb

    def is_zero(self):
        if self.ambient_rank == 0:
            return True
        one = self.ring.one
        zero = self.ring.zero
        for i in range(self.ambient_rank):
            e = [one if j == i else zero for j in range(self.ambient_rank)]
            if not self.gb.contains_column(e):
                return False
        return True

    def contains(self, column):
        return self.gb.contains_column(column)

    def fiber_dim(self, point):
        """dim over kappa(point) of the fiber M (x) kappa(point)."""
        if self.ambient_rank == 0:
            return 0
        rows = evaluate_matrix(self.relations, point)
        if not rows or not rows[0]:
            return self.ambient_rank
        return self.ambient_rank - linalg.rank(rows, self.ring.field)

    def graded_dim(self, d):
        """dim over k of the degree-d piece (graded presentations only).

        Counts standard monomials: basis elements (i, mono) of the free
        cover not divisible by any leading term of the relation module
        (quotient ideal included).
        """
        if self.degrees is None:
            raise ValueError("presentation is not graded")
        from .groebner import mono_divides

        lt_by_pos = {}
        for pos, mono in self.gb.leading_terms():
            lt_by_pos.setdefault(pos, []).append(mono)
        total = 0
        for i in range(self.ambient_rank):
            want = d - self.degrees[i]
            for mono in self.ring.monomials_of_degree(want):
                if not any(mono_divides(lt, mono) for lt in lt_by_pos.get(i, ())):
                    total += 1
        return total

    def direct_sum(self, other):
        if other.ring != self.ring:
            raise ValueError("mixed rings")
        rel = Mat.zero(self.ring, self.ambient_rank + other.ambient_rank,
                       self.relations.ncols + other.relations.ncols)
        rows = [list(r) for r in rel.rows]
        for i in range(self.ambient_rank):
            for j in range(self.relations.ncols):
                rows[i][j] = self.relations.rows[i][j]
        for i in range(other.ambient_rank):
            for j in range(other.relations.ncols):
                rows[self.ambient_rank + i][self.relations.ncols + j] = other.relations.rows[i][j]
        degrees = None
        if self.degrees is not None and other.degrees is not None:
            degrees = self.degrees + other.degrees
        return ModulePresentation(
            self.ring,
            self.ambient_rank + other.ambient_rank,
            Mat(self.ring, rows, ncols=rel.ncols),
            degrees,
        )

    def twist(self, shift):
        """Add `shift` to every generator degree (graded only)."""
        if self.degrees is None:
            raise ValueError("presentation is not graded")
        return ModulePresentation(
            self.ring,
            self.ambient_rank,
            self.relations,
            tuple(d + shift for d in self.degrees),
        )

    def syzygy_module(self):
        """Presentation of the relation module of this module's relations."""
        syz = syzygy_matrix(self.relations)
        degrees = None
        if self.degrees is not None:
            degrees = _column_degrees(self.relations, self.degrees)
        return ModulePresentation(self.ring, self.relations.ncols, syz, degrees)

    def __repr__(self):
        grading = f", degrees={self.degrees}" if self.degrees is not None else ""
        return (
            f"Module(rank {self.ambient_rank}, {self.relations.ncols} relations"
            f" over {self.ring}{grading})"
        )


def prune_redundant_columns(mat, extra=None, degrees=None):
    """Greedy irredundant subset of the columns of mat.

    A column is dropped when it lies in the span of the kept and
    remaining ones plus the optional extra block.  With column degrees
    the scan runs from high degree down, which over graded rings
    produces a minimal generating set.
    """
    if mat.ncols <= 1:
        return mat
    order = list(range(mat.ncols))
    if degrees is not None:
        col_degs = _column_degrees(mat, degrees)
        if col_degs is not None:
            order.sort(key=lambda j: (col_degs[j], j), reverse=True)
    drop = set()
    for j in order:
        candidates = [k for k in range(mat.ncols) if k != j and k not in drop]
        basis = mat.select_columns(candidates)
        if extra is not None and extra.ncols:
            basis = basis.hstack(extra) if basis.ncols else extra
        if basis.ncols == 0:
            continue
        if MatrixGB(basis).contains_column(mat.column(j)):
            drop.add(j)
    if not drop:
        return mat
    return mat.select_columns([j for j in range(mat.ncols) if j not in drop])


def _column_degrees(mat, row_degrees):
    """Degree of each (homogeneous) column given target generator degrees."""
    degs = []
    for j in range(mat.ncols):
        d = None
        for i in range(mat.nrows):
            p = mat.rows[i][j]
            if p.is_zero:
                continue
            pd = p.homogeneous_degree()
            if pd is None:
                return None
            cand = pd + row_degrees[i]
            if d is None:
                d = cand
            elif d != cand:
                return None
        degs.append(d if d is not None else 0)
    return tuple(degs)


def _check_homogeneous_columns(mat, row_degrees):
    if _column_degrees(mat, row_degrees) is None:
        raise ValueError("relations are not homogeneous for the given degrees")


def syzygies(gens, ring):
    """Relation module of a list of free-module elements (spec op).

    gens: ring elements or equal-length lists of ring elements.
    Returns the ModulePresentation whose ambient generators correspond
    to the input generators and whose relations generate all syzygies.
    """
    from .rings import Polynomial

    gens = list(gens)
    if not gens:
        return ModulePresentation.zero(ring)
    if isinstance(gens[0], Polynomial):
        mat = Mat(ring, [gens], ncols=len(gens))
    else:
        mat = Mat.from_columns(ring, gens, len(gens[0]))
    # relations field = the syzygy matrix, so gens-matrix . relations = 0
    return ModulePresentation(ring, mat.ncols, syzygy_matrix(mat))
