"""Buchberger engine on free-module elements over an exact field.

A vector is a dict mapping terms (position, exponent-tuple) to nonzero
field elements.  The engine is deliberately order-agnostic: callers
hand in a term key function (see orders.py).  Syzygies are computed by
the component-elimination trick: tag each generator with a unit vector
in a trailing block of positions, take a Gröbner basis for an order
where the leading block dominates, and read off the basis elements
supported entirely in the trailing block.

Quotient rings never appear here; rings.py appends the quotient ideal
times each basis vector before calling in.
"""

from __future__ import annotations

import heapq


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def vec_iadd_scaled(target, vec, coeff, shift, field):
    """target += coeff * x^shift * vec, in place."""
    for (pos, mono), c in vec.items():
        term = (pos, mono_mul(mono, shift))
        new = field.add(target.get(term, field.zero), field.mul(coeff, c))
        if new == field.zero:
            target.pop(term, None)
        else:
            target[term] = new


def vec_scale(vec, coeff, field):
    if coeff == field.zero:
        return {}
    return {t: field.mul(coeff, c) for t, c in vec.items()}


def leading_term(vec, key):
    return max(vec, key=key)


class _Basis:
    """Growing basis with cached leading data, grouped by position."""

    __slots__ = ("field", "key", "elements", "lts", "lcs", "by_pos")

    def __init__(self, field, key):
        self.field = field
        self.key = key
        self.elements = []
        self.lts = []
        self.lcs = []
        self.by_pos = {}

    def add(self, vec):
        lt = leading_term(vec, self.key)
        lc = vec[lt]
        if lc != self.field.one:
            inv = self.field.inv(lc)
            vec = vec_scale(vec, inv, self.field)
            lc = self.field.one
        idx = len(self.elements)
        self.elements.append(vec)
        self.lts.append(lt)
        self.lcs.append(lc)
        self.by_pos.setdefault(lt[0], []).append(idx)
        return idx


def reduce_vector(vec, basis, cofactors=None):
    """Full normal form of vec against basis; deterministic.

    If cofactors is a list (one poly-dict per basis element), the
    reduction quotients are accumulated there, so that
    vec = sum_i cofactors[i] * basis[i] + remainder.
    """
    field, key = basis.field, basis.key
    work = dict(vec)
    remainder = {}
    while work:
        term = max(work, key=key)
        coeff = work[term]
        pos, mono = term
        hit = None
        for idx in basis.by_pos.get(pos, ()):
            bpos, bmono = basis.lts[idx]
            if mono_divides(bmono, mono):
                hit = idx
                break
        if hit is None:
            del work[term]
            remainder[term] = coeff
            continue
        shift = mono_div(mono, basis.lts[hit][1])
        q = field.neg(coeff)  # basis elements are monic
        vec_iadd_scaled(work, basis.elements[hit], q, shift, field)
        if cofactors is not None:
            cof = cofactors[hit]
            new = field.add(cof.get(shift, field.zero), coeff)
            if new == field.zero:
                cof.pop(shift, None)
            else:
                cof[shift] = new
    return remainder


def _spair(basis, i, j):
    """S-vector of two basis elements with the same leading position."""
    field = basis.field
    (_, mi), (_, mj) = basis.lts[i], basis.lts[j]
    lcm = mono_lcm(mi, mj)
    si, sj = mono_div(lcm, mi), mono_div(lcm, mj)
    out = {}
    vec_iadd_scaled(out, basis.elements[i], field.one, si, field)
    vec_iadd_scaled(out, basis.elements[j], field.neg(field.one), sj, field)
    return out


def _pure_position(vec):
    positions = {pos for (pos, _m) in vec}
    return len(positions) == 1


def buchberger(gens, field, key, degree_cap=None):
    """Gröbner basis of the submodule generated by gens (list of vecs).

    Returns the interreduced, monic, deterministically sorted basis.
    degree_cap, when given, discards S-pairs whose lcm total degree
    exceeds it (used only for degree-truncated experiments; the
    default None computes a full basis).
    """
    basis = _Basis(field, key)
    pairs = []
    for g in sorted((g for g in gens if g), key=lambda v: key(leading_term(v, key))):
        _add_with_pairs(basis, dict(g), pairs)
    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        if _pair_redundant(basis, i, j):
            continue
        (_, mi), (_, mj) = basis.lts[i], basis.lts[j]
        lcm = mono_lcm(mi, mj)
        if degree_cap is not None and sum(lcm) > degree_cap:
            continue
        # Product criterion.  Only valid for elements supported in a
        # single position (vectors spanning several components can have
        # nontrivial S-pairs even with coprime leading monomials).
        if (
            mono_mul(mi, mj) == lcm
            and _pure_position(basis.elements[i])
            and _pure_position(basis.elements[j])
        ):
            continue
        s = _spair(basis, i, j)
        r = reduce_vector(s, basis)
        if r:
            _add_with_pairs(basis, r, pairs)
    return interreduce(basis.elements, field, key)


def _add_with_pairs(basis, vec, pairs):
    idx = basis.add(vec)
    pos = basis.lts[idx][0]
    for other in basis.by_pos[pos]:
        if other == idx:
            continue
        lcm = mono_lcm(basis.lts[other][1], basis.lts[idx][1])
        heapq.heappush(pairs, (sum(lcm), basis.key((pos, lcm)), other, idx))
    return idx


def _pair_redundant(basis, i, j):
    """Chain criterion: some k with LT(k) | lcm and both mixed pairs done.

    Conservative version: only skip when LT(k) strictly divides the lcm
    and k > max(i, j) was already inserted (its pairs with i and j were
    enqueued after and will be or were processed).  Keeping this weak
    preserves correctness without bookkeeping processed-pair sets.
    """
    (_, mi), (_, mj) = basis.lts[i], basis.lts[j]
    pos = basis.lts[i][0]
    lcm = mono_lcm(mi, mj)
    for k in basis.by_pos.get(pos, ()):
        if k == i or k == j:
            continue
        mk = basis.lts[k][1]
        if mono_divides(mk, lcm) and mk != mi and mk != mj:
            if mono_lcm(mk, mi) != lcm and mono_lcm(mk, mj) != lcm:
                return True
    return False


def _monic(vec, field, key):
    lt = leading_term(vec, key)
    lc = vec[lt]
    if lc != field.one:
        vec = vec_scale(vec, field.inv(lc), field)
    return vec


def interreduce(elements, field, key):
    """Minimal reduced form of a Gröbner basis: drop leading-term
    redundant elements (ascending scan, so a divisor is kept first),
    then tail-reduce survivors to a fixpoint.  Tail reduction cannot
    kill an element since the kept leading terms are incomparable."""
    elems = [_monic(dict(e), field, key) for e in elements if e]
    elems.sort(key=lambda v: key(leading_term(v, key)))
    kept = []
    kept_lts = []
    for e in elems:
        pos, mono = leading_term(e, key)
        if any(p == pos and mono_divides(m, mono) for (p, m) in kept_lts):
            continue
        kept.append(e)
        kept_lts.append((pos, mono))
    changed = True
    while changed:
        changed = False
        for i in range(len(kept)):
            others = _Basis(field, key)
            for j, f in enumerate(kept):
                if j != i:
                    others.add(dict(f))
            r = _monic(reduce_vector(dict(kept[i]), others), field, key)
            if r != kept[i]:
                kept[i] = r
                changed = True
    kept.sort(key=lambda v: key(leading_term(v, key)))
    return kept


def groebner(gens, field, key):
    return buchberger(gens, field, key)


def normal_form(vec, gb, field, key):
    basis = _Basis(field, key)
    for g in gb:
        basis.add(dict(g))
    return reduce_vector(dict(vec), basis)


def elimination_key(rank, ring_key):
    """Order on R^(rank + n) where the first `rank` positions dominate.

    Within each block: term over position.
    """

    def key(term):
        pos, mono = term
        return (1 if pos < rank else 0, ring_key(mono), -pos)

    return key


def syzygy_basis(gens, rank, nvars, field, ring_key, extra=()):
    """Generators of the syzygy module of gens inside R^rank.

    `extra` holds untagged vectors (quotient-ideal multiples) whose
    relations are not reported: the result is a list of vectors in
    R^len(gens) with syzygies taken modulo the extra block.
    """
    n = len(gens)
    unit = (0,) * nvars
    augmented = []
    for i, g in enumerate(gens):
        aug = {(pos, mono): c for (pos, mono), c in g.items()}
        aug[(rank + i, unit)] = field.one
        augmented.append(aug)
    for e in extra:
        if e:
            augmented.append(dict(e))
    key = elimination_key(rank, ring_key)
    gb = buchberger(augmented, field, key)
    out = []
    for g in gb:
        if all(pos >= rank for (pos, _mono) in g):
            out.append({(pos - rank, mono): c for (pos, mono), c in g.items()})
    return out


class ModuleGB:
    """Gröbner data for a list of generators of a submodule of R^rank.

    Supports canonical normal forms, membership, and lifting vectors to
    coordinate representations in terms of the tagged generators.
    """

    def __init__(self, gens, rank, nvars, field, ring_key, extra=()):
        self.rank = rank
        self.nvars = nvars
        self.field = field
        self.ring_key = ring_key
        self.ngens = len(gens)
        unit = (0,) * nvars
        augmented = []
        for i, g in enumerate(gens):
            aug = {t: c for t, c in g.items()}
            aug[(rank + i, unit)] = field.one
            augmented.append(aug)
        for e in extra:
            if e:
                augmented.append(dict(e))
        self.key = elimination_key(rank, ring_key)
        self.aug_gb = buchberger(augmented, field, self.key)
        self._aug_basis = _Basis(field, self.key)
        for g in self.aug_gb:
            self._aug_basis.add(dict(g))
        # plain basis for normal forms in R^rank
        plain = [
            {t: c for t, c in g.items() if t[0] < rank}
            for g in self.aug_gb
            if any(t[0] < rank for t in g)
        ]
        mkey = lambda term: (ring_key(term[1]), -term[0])
        self.plain_gb = interreduce(plain, field, mkey)
        self._plain_basis = _Basis(field, mkey)
        for g in self.plain_gb:
            self._plain_basis.add(dict(g))

    def normal_form(self, vec):
        return reduce_vector(dict(vec), self._plain_basis)

    def contains(self, vec):
        return not self.normal_form(vec)

    def lift(self, vec):
        """Coefficients expressing vec over the generators, or None.

        Returns a list of poly-dicts c with vec = sum_i c[i] * gens[i]
        (modulo the extra block).
        """
        work = {(pos, mono): c for (pos, mono), c in vec.items()}
        rem = reduce_vector(work, self._aug_basis)
        if any(pos < self.rank for (pos, _m) in rem):
            return None
        coeffs = [{} for _ in range(self.ngens)]
        for (pos, mono), c in rem.items():
            coeffs[pos - self.rank][mono] = self.field.neg(c)
        return coeffs
