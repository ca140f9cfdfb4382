"""Free resolutions and free replacements of complexes.

Modules are resolved by iterated syzygies.  A bounded complex of
finitely presented modules is replaced by a quasi-isomorphic complex of
free modules built top-down: at each step the new free term covers the
fiber product of the current term with the kernel of the differential
one step up, which keeps the comparison map termwise surjective with
exact kernel.  Truncated tails are recorded honestly via the tail flag
(homology is only trusted strictly above the floor of a truncated
window).
"""

from __future__ import annotations

from .complexes import (
    EXACT_BELOW,
    ZERO_BELOW,
    FreeComplex,
    minimize,
    tensor,
)
from .modules import ModulePresentation, _column_degrees, prune_redundant_columns
from .rings import Mat, MatrixGB, syzygy_matrix


class FPComplex:
    """Bounded complex of finitely presented modules.

    maps[i] sends generators of terms[i] to columns over generators of
    terms[i+1]; well-definedness (relations map into relations) and
    d o d = 0 are checked modulo relations.
    """

    def __init__(self, ring, terms, maps, check=True):
        self.ring = ring
        self.terms = {i: t for i, t in terms.items() if t.ambient_rank}
        self.maps = {
            i: m
            for i, m in maps.items()
            if i in self.terms and (i + 1) in self.terms and not m.is_zero
        }
        if self.terms:
            self.lo = min(self.terms)
            self.hi = max(self.terms)
        else:
            self.lo, self.hi = 0, -1
        if check:
            self._validate()

    def term(self, i):
        return self.terms.get(i) or ModulePresentation.zero(self.ring)

    def map(self, i):
        if i in self.maps:
            return self.maps[i]
        return Mat.zero(self.ring, self.term(i + 1).ambient_rank, self.term(i).ambient_rank)

    def _validate(self):
        for i, m in self.maps.items():
            src, tgt = self.term(i), self.term(i + 1)
            if m.nrows != tgt.ambient_rank or m.ncols != src.ambient_rank:
                raise ValueError(f"map at {i} has wrong shape")
            rel = src.relations
            if rel.ncols:
                image = m * rel
                for j in range(image.ncols):
                    if not tgt.contains(image.column(j)):
                        raise ValueError(f"map at {i} not well defined on relations")
        for i in self.maps:
            if (i + 1) in self.maps:
                comp = self.maps[i + 1] * self.maps[i]
                tgt = self.term(i + 2)
                for j in range(comp.ncols):
                    if not tgt.contains(comp.column(j)):
                        raise ValueError(f"d o d != 0 (mod relations) at {i}")

    @classmethod
    def from_module(cls, module, at=0):
        return cls(module.ring, {at: module}, {}, check=False)

    @classmethod
    def from_free(cls, complex_):
        terms = {}
        maps = {}
        for i, r in complex_.ranks.items():
            degs = complex_.degrees[i] if complex_.degrees is not None else None
            terms[i] = ModulePresentation.free(complex_.ring, r, degs)
        for i, m in complex_.diffs.items():
            maps[i] = m
        return cls(complex_.ring, terms, maps, check=False)


def _kernel_of(mat, ring, nrows=None):
    if mat.ncols == 0:
        return Mat.zero(ring, 0, 0)
    if mat.nrows == 0:
        return Mat.identity(ring, mat.ncols)
    return syzygy_matrix(mat)


def free_replacement(fpc, floor, minimal=True):
    """Free complex quasi-isomorphic to fpc in degrees > floor.

    Returns a FreeComplex with window [floor, hi] whose homology agrees
    with fpc in degrees >= floor + 1 (and everywhere when the
    construction terminates by itself, tail 'zero').  A complex whose
    terms are all free short-circuits to itself.
    """
    ring = fpc.ring
    if not fpc.terms:
        return FreeComplex.zero_complex(ring)
    if all(t.relations.ncols == 0 for t in fpc.terms.values()):
        ranks = {i: t.ambient_rank for i, t in fpc.terms.items()}
        degrees = None
        if all(t.degrees is not None for t in fpc.terms.values()):
            degrees = {i: t.degrees for i, t in fpc.terms.items()}
        out = FreeComplex(ring, ranks, dict(fpc.maps), degrees, ZERO_BELOW)
        return minimize(out) if minimal else out
    hi = fpc.hi
    graded = all(t.degrees is not None for t in fpc.terms.values())

    ranks = {}
    diffs = {}
    degrees = {} if graded else None
    # state for degree k+1 of the free complex
    rank_up = 0
    phi_up = None  # Mat: gens(C^{k+1}) x rank_up
    diff_up = None  # Mat: rank(k+2) x rank_up
    degs_up = ()
    tail = ZERO_BELOW

    k = hi
    while k >= floor:
        c_k = fpc.term(k)
        g_k = c_k.ambient_rank
        if rank_up == 0:
            # no constraints from above: cover C^k directly
            new_rank = g_k
            phi = Mat.identity(ring, g_k) if g_k else Mat.zero(ring, 0, 0)
            d_new = Mat.zero(ring, 0, new_rank)
            new_degs = tuple(c_k.degrees) if graded and g_k else ()
        else:
            if diff_up is None:
                z = Mat.identity(ring, rank_up)
            else:
                z = _kernel_of(diff_up, ring)
                if minimal and z.ncols > 1:
                    z = prune_redundant_columns(z)
            phi_z = phi_up * z if (phi_up is not None and phi_up.nrows) else Mat.zero(ring, 0, z.ncols)
            d_map = fpc.map(k)
            rel_up = fpc.term(k + 1).relations
            blocks = []
            if g_k:
                blocks.append(d_map)
            blocks.append(-phi_z)
            if rel_up.ncols:
                blocks.append(rel_up)
            if phi_z.nrows == 0:
                # target is the zero module: every pair works
                big = None
            else:
                big = blocks[0]
                for b in blocks[1:]:
                    big = big.hstack(b)
            if big is None:
                # generators: all of C^k gens and all kernel gens
                xy_cols = []
                for j in range(g_k):
                    col = [ring.zero] * (g_k + z.ncols)
                    col[j] = ring.one
                    xy_cols.append(col)
                for j in range(z.ncols):
                    col = [ring.zero] * (g_k + z.ncols)
                    col[g_k + j] = ring.one
                    xy_cols.append(col)
                sol = (
                    Mat.from_columns(ring, xy_cols, g_k + z.ncols)
                    if xy_cols
                    else Mat.zero(ring, g_k + z.ncols, 0)
                )
            else:
                syz = syzygy_matrix(big)
                sol = syz.select_rows(range(g_k + z.ncols))
            # drop columns with no (x, y) content
            keep = [j for j in range(sol.ncols) if any(
                not sol.rows[i][j].is_zero for i in range(sol.nrows))]
            sol = sol.select_columns(keep)
            if minimal and sol.ncols > 1:
                rel_k = fpc.term(k).relations
                pad = None
                if rel_k.ncols:
                    pad = rel_k.vstack(Mat.zero(ring, z.ncols, rel_k.ncols))
                stacked = None
                if graded:
                    stacked = (tuple(c_k.degrees) if g_k else ()) + (
                        _column_degrees(z, degs_up) or ()
                    )
                    if len(stacked) != sol.nrows:
                        stacked = None
                sol = prune_redundant_columns(sol, pad, stacked)
            new_rank = sol.ncols
            phi = sol.select_rows(range(g_k)) if g_k else Mat.zero(ring, 0, new_rank)
            y_part = sol.select_rows(range(g_k, g_k + z.ncols))
            d_new = z * y_part if z.ncols else Mat.zero(ring, rank_up, new_rank)
            new_degs = None
            if graded:
                stacked_degs = (tuple(c_k.degrees) if g_k else ()) + (
                    _column_degrees(z, degs_up) or ()
                )
                if len(stacked_degs) == sol.nrows:
                    new_degs = _column_degrees(sol, stacked_degs)
            if graded and new_degs is None:
                graded = False
                degrees = None
        if new_rank:
            ranks[k] = new_rank
            if d_new.nrows and new_rank:
                diffs[k] = d_new
            if degrees is not None:
                degrees[k] = tuple(new_degs)
        if new_rank == 0 and all(fpc.term(j).ambient_rank == 0 for j in range(floor, k)):
            tail = ZERO_BELOW
            break
        rank_up = new_rank
        phi_up = phi
        diff_up = d_new if d_new.nrows else None
        degs_up = new_degs if graded else ()
        k -= 1
    else:
        tail = (
            ZERO_BELOW
            if rank_up == 0
            else EXACT_BELOW
        )
    out = FreeComplex(ring, ranks, diffs, degrees, tail)
    if minimal:
        out = minimize(out)
    return out


def homology_data(obj, i):
    """Raw homology data at degree i of a free or presented complex.

    Returns (ambient rank, kernel matrix, boundary matrix, term
    relations, presentation of H^i); the matrices live in the ambient
    free cover of the term, which is what induced-map computations on
    towers consume.
    """
    ring = obj.ring
    if isinstance(obj, FreeComplex):
        floor = obj.homology_floor()
        if i < floor and obj.tail != ZERO_BELOW:
            raise ValueError(f"homology at {i} not determined (tail {obj.tail})")
        g = obj.rank(i)
        term_rel = Mat.zero(ring, g, 0)
        term_degs = obj.degrees[i] if (obj.degrees is not None and g) else None
        d_i = obj.diff(i)
        d_prev = obj.diff(i - 1)
        up_rel = Mat.zero(ring, obj.rank(i + 1), 0)
    else:
        term = obj.term(i)
        g = term.ambient_rank
        term_rel = term.relations
        term_degs = term.degrees
        d_i = obj.map(i)
        d_prev = obj.map(i - 1)
        up_rel = obj.term(i + 1).relations
    zero_h = ModulePresentation.zero(ring)
    if g == 0:
        z = Mat.zero(ring, 0, 0)
        return 0, z, z, z, zero_h
    if d_i.nrows == 0:
        kernel = Mat.identity(ring, g)
    else:
        big = d_i
        if up_rel.ncols:
            big = big.hstack(up_rel)
        kernel = syzygy_matrix(big).select_rows(range(g))
        keep = [
            j
            for j in range(kernel.ncols)
            if any(not kernel.rows[r][j].is_zero for r in range(g))
        ]
        kernel = kernel.select_columns(keep)
    if kernel.ncols == 0:
        return g, kernel, d_prev, term_rel, zero_h
    blocks = kernel
    if d_prev.ncols:
        blocks = blocks.hstack(d_prev)
    if term_rel.ncols:
        blocks = blocks.hstack(term_rel)
    relations = syzygy_matrix(blocks).select_rows(range(kernel.ncols))
    degrees = None
    if term_degs is not None:
        degrees = _column_degrees(kernel, term_degs)
    pres = ModulePresentation(ring, kernel.ncols, relations, degrees)
    return g, kernel, d_prev, term_rel, pres


def fp_homology(fpc, i):
    """H^i of a complex of presented modules, as a presentation.

    Kernel and image are computed directly with syzygies; no free
    replacement is involved, so this is an independent route from
    resolving and taking homology of the free replacement.
    """
    return homology_data(fpc, i)[4]


def module_tensor_complex(module, complex_):
    """M (x) C for a presented module and a free complex, as FPComplex.

    Term i is M^(rank i) with generator degrees shifted by the
    complex's; the maps are the complex differentials acting blockwise.
    """
    ring = module.ring
    if complex_.ring != ring:
        raise ValueError("module and complex over different rings")
    amb = module.ambient_rank
    terms = {}
    maps = {}
    for i, r in complex_.ranks.items():
        degs = None
        if module.degrees is not None and complex_.degrees is not None:
            degs = tuple(
                module.degrees[j] + complex_.degrees[i][b]
                for b in range(r)
                for j in range(amb)
            )
        nrel = module.relations.ncols
        rel = Mat.zero(ring, r * amb, r * nrel)
        if nrel:
            rows = [[ring.zero] * (r * nrel) for _ in range(r * amb)]
            for b in range(r):
                for a in range(amb):
                    for c in range(nrel):
                        rows[b * amb + a][b * nrel + c] = module.relations.rows[a][c]
            rel = Mat(ring, rows, ncols=r * nrel)
        terms[i] = ModulePresentation(ring, r * amb, rel, degs)
    for i, m in complex_.diffs.items():
        r_src = complex_.rank(i)
        r_tgt = complex_.rank(i + 1)
        rows = [[ring.zero] * (r_src * amb) for _ in range(r_tgt * amb)]
        for s in range(r_tgt):
            for c in range(r_src):
                entry = m.rows[s][c]
                if entry.is_zero:
                    continue
                for a in range(amb):
                    rows[s * amb + a][c * amb + a] = entry
        maps[i] = Mat(ring, rows, ncols=r_src * amb)
    return FPComplex(ring, terms, maps, check=False)


class ResolutionWindow:
    """A free complex quasi-isomorphic to the target within a window."""

    __slots__ = ("target", "complex", "depth", "minimal")

    def __init__(self, target, complex_, depth, minimal):
        self.target = target
        self.complex = complex_
        self.depth = depth
        self.minimal = minimal

    def __repr__(self):
        flag = "minimal " if self.minimal else ""
        return f"ResolutionWindow({flag}{self.complex})"


def free_resolution(target, depth, minimal=True):
    """Resolution window of a module or complex by free modules.

    Modules: iterated syzygies, with early stop (tail 'zero') when a
    syzygy module vanishes -- over a plain polynomial ring with graded
    input this always happens within the number of variables.
    Free complexes resolve to themselves; complexes of presented
    modules go through the free replacement.
    """
    if isinstance(target, FreeComplex):
        return ResolutionWindow(target, target, depth, False)
    if isinstance(target, FPComplex):
        floor = target.lo - depth
        return ResolutionWindow(target, free_replacement(target, floor, minimal), depth, minimal)
    module = target
    ring = module.ring
    ranks = {0: module.ambient_rank}
    diffs = {}
    degrees = {0: module.degrees} if module.degrees is not None else None
    graded = degrees is not None
    tail = ZERO_BELOW
    current = module.relations
    cur_degs = module.degrees
    k = 0
    while current.ncols:
        ranks[k - 1] = current.ncols
        diffs[k - 1] = current
        if graded:
            cd = _column_degrees(current, cur_degs)
            if cd is None:
                graded = False
                degrees = None
            else:
                degrees[k - 1] = cd
                cur_degs = cd
        k -= 1
        if -k >= depth:
            tail = EXACT_BELOW
            break
        current = syzygy_matrix(current)
    out = FreeComplex(ring, ranks, diffs, degrees, tail)
    if minimal:
        out = minimize(out)
    return ResolutionWindow(module, out, depth, minimal)


def to_free_complex(obj, depth, minimal=True):
    if isinstance(obj, FreeComplex):
        return obj
    return free_resolution(obj, depth, minimal).complex


def truncate_below(complex_, new_lo):
    """Forget terms in degrees < new_lo; homology valid from new_lo + 1."""
    if new_lo <= complex_.lo:
        return complex_
    ranks = {i: r for i, r in complex_.ranks.items() if i >= new_lo}
    diffs = {i: m for i, m in complex_.diffs.items() if i >= new_lo}
    degrees = None
    if complex_.degrees is not None:
        degrees = {i: d for i, d in complex_.degrees.items() if i >= new_lo}
    return FreeComplex(complex_.ring, ranks, diffs, degrees, EXACT_BELOW, check=False)


def derived_tensor(e, f, depth=6, minimal=True):
    """E (x)^L F as a free complex with an honest validity window.

    Module inputs are resolved to a depth sufficient for the requested
    one; if a truncated resolution enters, the output is truncated to
    the degrees where its homology provably agrees with the derived
    tensor and flagged 'exact' below.
    """
    e_top = e.hi if isinstance(e, (FreeComplex, FPComplex)) else 0
    f_top = f.hi if isinstance(f, (FreeComplex, FPComplex)) else 0
    re = to_free_complex(e, depth + max(0, f_top) + 2, minimal)
    rf = to_free_complex(f, depth + max(0, e_top) + 2, minimal)
    t = tensor(re, rf)
    bounds = []
    if re.tail != ZERO_BELOW:
        bounds.append(re.lo + rf.hi + 2)
    if rf.tail != ZERO_BELOW:
        bounds.append(rf.lo + re.hi + 2)
    if not bounds:
        return t
    valid_from = max(bounds)
    return truncate_below(t, valid_from - 1)


def truncate_le(complex_, k, depth=6, minimal=True):
    """Homological truncation: homology equals the input's in degrees
    <= k and vanishes above.  Output is a free complex again."""
    ring = complex_.ring
    if k >= complex_.hi:
        return complex_
    floor = complex_.homology_floor()
    if k + 1 < floor:
        raise ValueError("truncation level below the trustworthy window")
    d_k = complex_.diff(k)
    if complex_.rank(k) == 0:
        kernel = Mat.zero(ring, 0, 0)
    elif complex_.rank(k + 1) == 0:
        kernel = Mat.identity(ring, complex_.rank(k))
    else:
        kernel = syzygy_matrix(d_k)
    terms = {}
    maps = {}
    for i in range(complex_.lo, k):
        degs = complex_.degrees[i] if complex_.degrees is not None else None
        terms[i] = ModulePresentation.free(ring, complex_.rank(i), degs)
        if i < k - 1:
            maps[i] = complex_.diff(i)
    if kernel.ncols:
        syz = syzygy_matrix(kernel)
        kdegs = None
        if complex_.degrees is not None:
            kdegs = _column_degrees(kernel, complex_.degrees[k])
        terms[k] = ModulePresentation(ring, kernel.ncols, syz, kdegs)
        if complex_.rank(k - 1):
            lift = MatrixGB(kernel).lift_matrix(complex_.diff(k - 1))
            if lift is None:
                raise ValueError("image does not land in the kernel")
            maps[k - 1] = lift
    fpc = FPComplex(ring, terms, maps, check=False)
    lo_out = min(complex_.lo, k) - 1
    out = free_replacement(fpc, lo_out, minimal)
    if complex_.tail == ZERO_BELOW and out.tail == ZERO_BELOW:
        return out
    return out
