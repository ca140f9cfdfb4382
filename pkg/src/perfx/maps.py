"""Ring homomorphisms between polynomial quotients.

A RingMap sends each source variable to an element of the target ring;
well-definedness on the quotient is checked at construction.  The
module-finiteness test and the A-module presentation of a
module-finite target both run in a combined ring k[target vars,
source vars] with a block elimination order: a pure power of every
target variable among the leading terms certifies finiteness, and the
kernel of A^(basis) -> B is read off from basis elements free of both
the tag component and the target block.
"""

from __future__ import annotations

from .modules import ModulePresentation
from .orders import BlockOrder, GREVLEX
from .rings import Mat, PolyRing, Polynomial, RationalPoint
from . import groebner as gb


class RingMap:
    __slots__ = ("source", "target", "images", "_finite_cache", "_rewrite_cache")

    def __init__(self, source, target, images):
        if len(images) != source.nvars:
            raise ValueError("one image per source variable")
        self.source = source
        self.target = target
        self.images = tuple(
            target.parse(im) if isinstance(im, str) else im for im in images
        )
        for q in source.quotient_gb:
            if not self.apply(q).is_zero:
                raise ValueError(
                    f"map not well defined: quotient generator {q} has nonzero image"
                )
        self._finite_cache = None
        self._rewrite_cache = None

    def apply(self, p):
        if p.ring.variables != self.source.variables:
            raise ValueError("element not from the source ring")
        return p.substitute(self.images, target=self.target)

    def apply_matrix(self, mat):
        return Mat(
            self.target,
            [[self.apply(x) for x in row] for row in mat.rows],
            ncols=mat.ncols,
        )

    def apply_point(self, point):
        """Image in Spec(source) of a rational point of Spec(target)."""
        coords = tuple(im.evaluate(point.coords) for im in self.images)
        return RationalPoint(self.source, coords)

    def apply_complex(self, complex_, keep_degrees=None):
        """Entrywise image of a free complex; d o d = 0 re-verified."""
        from .complexes import FreeComplex

        diffs = {i: self.apply_matrix(m) for i, m in complex_.diffs.items()}
        degrees = None
        if complex_.degrees is not None:
            if keep_degrees is None:
                keep_degrees = self.preserves_grading()
            if keep_degrees:
                degrees = dict(complex_.degrees)
        return FreeComplex(
            self.target, dict(complex_.ranks), diffs, degrees, complex_.tail
        )

    def preserves_grading(self):
        """True when each image is homogeneous of its variable's weight."""
        for i, im in enumerate(self.images):
            if im.is_zero:
                continue
            d = im.homogeneous_degree()
            if d is None or d != self.source.weights[i]:
                return False
        return True

    def is_identity(self):
        if self.source != self.target:
            return False
        return all(self.images[i] == self.target.var(i) for i in range(self.source.nvars))

    def compose(self, other):
        """self o other: other's source ring, mapped through both."""
        if other.target.variables != self.source.variables:
            raise ValueError("maps do not compose")
        images = [self.apply(Polynomial(self.source, im.terms)) for im in other.images]
        return RingMap(other.source, self.target, images)

    @classmethod
    def identity(cls, ring):
        return cls(ring, ring, ring.gens())

    def __repr__(self):
        ims = ", ".join(
            f"{v}->{im}" for v, im in zip(self.source.variables, self.images)
        )
        return f"RingMap({self.source} -> {self.target}; {ims})"

    # -- module finiteness and restriction of scalars --------------------

    def _combined(self):
        """Combined polynomial ring k[target vars, source vars], block order."""
        tvars = self.target.variables
        svars = tuple(f"{v}__src" if v in tvars else v for v in self.source.variables)
        ring = PolyRing(
            self.target.field, tvars + svars, BlockOrder(len(tvars))
        )
        lift_t = {v: ring.var(i) for i, v in enumerate(tvars)}
        lift_s = [ring.var(len(tvars) + i) for i in range(len(svars))]
        gens = []
        for q in self.target.quotient_gb:
            gens.append(_relift(q, ring, 0))
        for i, im in enumerate(self.images):
            gens.append(lift_s[i] - _relift(im, ring, 0))
        for q in self.source.quotient_gb:
            gens.append(_relift(q, ring, len(tvars)))
        return ring, gens, len(tvars)

    def finiteness(self):
        """(is_finite, basis monomials of the target over the source).

        Caches the block-order Gröbner computation.  The basis, present
        only in the finite case, is a spanning set of target monomials.
        """
        if self._finite_cache is not None:
            return self._finite_cache
        ring, gens, ntv = self._combined()
        vecs = [{(0, m): c for m, c in g.terms.items()} for g in gens if not g.is_zero]
        from .orders import term_over_position

        basis = gb.buchberger(vecs, ring.field, term_over_position(ring.order))
        lms = [max(v, key=lambda t: ring.order.key(t[1]))[1] for v in basis]
        box = [None] * ntv
        tfree_lms = []
        for m in lms:
            if any(m[ntv:]):
                continue
            tfree_lms.append(m[:ntv])
            support = [i for i in range(ntv) if m[i]]
            if len(support) == 1:
                i = support[0]
                if box[i] is None or m[i] < box[i]:
                    box[i] = m[i]
        if any(b is None for b in box) and ntv > 0:
            self._finite_cache = (False, None)
            return self._finite_cache
        monos = [()]
        for i in range(ntv):
            monos = [m + (e,) for m in monos for e in range(box[i])]
        keep = []
        for m in monos:
            if not any(gb.mono_divides(lm, m) for lm in tfree_lms):
                keep.append(m)
        keep.sort(key=self.target.order.key)
        self._finite_cache = (True, keep)
        return self._finite_cache

    def is_module_finite(self):
        return self.finiteness()[0]

    def module_basis(self):
        finite, basis = self.finiteness()
        if not finite:
            raise ValueError("target is not module-finite over the source")
        return basis

    def _rewrite_data(self):
        if self._rewrite_cache is None:
            ring, gens, ntv = self._combined()
            vecs = [
                {(0, m): c for m, c in g.terms.items()} for g in gens if not g.is_zero
            ]
            from .orders import term_over_position

            gbasis = gb.buchberger(vecs, ring.field, term_over_position(ring.order))
            self._rewrite_cache = (ring, gbasis, ntv)
        return self._rewrite_cache

    def rewrite_to_source(self, element):
        """Write a target element as sum a_m(source) * basis monomial m.

        Returns a dict {basis monomial: source ring element}.
        """
        basis = self.module_basis()
        ring, gbasis, ntv = self._rewrite_data()
        from .orders import term_over_position

        lifted = {(0, m + (0,) * (ring.nvars - ntv)): c for m, c in element.terms.items()}
        red = gb.normal_form(lifted, gbasis, ring.field, term_over_position(ring.order))
        out = {}
        for (_pos, m), c in red.items():
            u_part, t_part = m[:ntv], m[ntv:]
            if u_part not in out:
                out[u_part] = {}
            out[u_part][t_part] = c
        result = {}
        for u_part, terms in out.items():
            if u_part not in basis:
                raise AssertionError("normal form left the spanning box")
            result[u_part] = self.source.reduce_terms(dict(terms))
        return result

    def source_module_presentation(self):
        """The target as a finitely presented module over the source.

        Returns (basis monomials, ModulePresentation over the source).
        """
        basis = self.module_basis()
        ring, gens, ntv = self._combined()
        nb = len(basis)
        # component 0 carries B; components 1..nb tag the basis monomials.
        aug = []
        for j, m in enumerate(basis):
            vec = {(0, m + (0,) * (ring.nvars - ntv)): ring.field.one}
            vec[(1 + j, (0,) * ring.nvars)] = ring.field.neg(ring.field.one)
            aug.append(vec)
        for g in gens:
            if not g.is_zero:
                aug.append({(0, m): c for m, c in g.terms.items()})
        key = _restriction_key(ring, ntv)
        basis_gb = gb.buchberger(aug, ring.field, key)
        rel_cols = []
        for v in basis_gb:
            if any(pos == 0 for (pos, _m) in v):
                continue
            if any(any(m[:ntv]) for (_pos, m) in v):
                continue
            col = [self.source.zero] * nb
            for (pos, m), c in v.items():
                t_mono = m[ntv:]
                col[pos - 1] = col[pos - 1] + self.source.reduce_terms({t_mono: c})
            if any(not x.is_zero for x in col):
                rel_cols.append(col)
        if rel_cols:
            rel = Mat.from_columns(self.source, rel_cols, nb)
            from .modules import prune_redundant_columns

            rel = prune_redundant_columns(rel)
        else:
            rel = Mat.zero(self.source, nb, 0)
        return basis, ModulePresentation(self.source, nb, rel)


def _restriction_key(ring, ntv):
    """Order: component 0 dominates, then target-block content, then rest."""
    okey = GREVLEX.key

    def key(term):
        pos, mono = term
        u_part, t_part = mono[:ntv], mono[ntv:]
        return (
            1 if pos == 0 else 0,
            okey(u_part),
            -pos,
            okey(t_part),
        )

    return key


def _relift(p, ring, offset):
    """Re-embed a polynomial into the combined ring at a variable offset."""
    terms = {}
    for m, c in p.terms.items():
        mono = [0] * ring.nvars
        for i, e in enumerate(m):
            mono[offset + i] = e
        terms[tuple(mono)] = c
    return Polynomial(ring, terms)
