"""Module Groebner bases over S = k[x_0..x_n] for homogeneous submodules.

Buchberger's algorithm runs degree by degree (normal selection strategy for
homogeneous input) with Buchberger's chain criterion.  Because the pairs of
degree t are exhausted before the input generators of degree t are reduced,
the same pass reports which input generators are minimal (graded Nakayama).

Syzygies follow Schreyer: the S-pair relations of a Groebner basis, restricted
to the pairs whose Schreyer lead terms are minimal, generate the syzygies of
the basis; tracked cofactors translate them back to the input generators.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Optional, Sequence

from .ring import (
    FreeModule,
    RingError,
    Vector,
    degrevlex_key,
    mon_div,
    mon_divides,
    mon_lcm,
    mon_mul,
    vec_add,
    vec_mul_term,
)


class TermOrder:
    """Term-over-position over degrevlex, or a Schreyer order.

    The Schreyer order on a free module with basis e_j induced by lead terms
    (p_j, lm_j) of a base module compares m e_j by the base key of
    (p_j, m * lm_j), ties broken by preferring the smaller index.
    """

    def __init__(self, schreyer: Optional[tuple] = None):
        self.schreyer = schreyer
        self._cache: dict = {}

    @property
    def name(self) -> str:
        return "schreyer" if self.schreyer else "top-degrevlex"

    def key(self, term):
        k = self._cache.get(term)
        if k is None:
            pos, mon = term
            if self.schreyer is None:
                k = (degrevlex_key(mon), -pos)
            else:
                base, leads = self.schreyer
                bp, bm = leads[pos]
                k = (base.key((bp, mon_mul(mon, bm))), -pos)
            self._cache[term] = k
        return k


TOP = TermOrder()


def _lead(v: Vector, key):
    return max(v, key=key)


class SubmoduleBasis:
    """Generators of a homogeneous submodule of ``ambient`` with a reduced
    Groebner basis, lead terms and (optionally) cofactors ``reps`` expressing
    each basis element in the generators."""

    def __init__(
        self,
        ambient: FreeModule,
        generators: Sequence[Vector],
        order: TermOrder = TOP,
        track: bool = True,
        degrees: Optional[Sequence[int]] = None,
        modulo: Sequence[int] = (),
    ):
        self.ambient = ambient
        self.ring = ambient.ring
        self.field = ambient.ring.field
        self.order = order
        gens = []
        degs = []
        for i, g in enumerate(generators):
            g = {t: c for t, c in g.items() if c}
            try:
                d = ambient.vector_degree(g)
            except RingError:
                raise RingError(f"generator {i} is not homogeneous") from None
            if d is None:
                d = degrees[i] if degrees is not None else None
            elif degrees is not None and degrees[i] is not None and degrees[i] != d:
                raise RingError(f"generator {i} has degree {d}, expected {degrees[i]}")
            gens.append(g)
            degs.append(d)
        self.generators = tuple(gens)
        self.degrees = tuple(degs)
        self.modulo = frozenset(modulo)
        self.track = track
        self.gb: List[Vector] = []
        self.leads: list = []
        self.reps: Optional[List[Vector]] = [] if track else None
        self.minimal: List[int] = []
        self._by_pos: Dict[int, List[int]] = defaultdict(list)
        self._run()

    # -------------------------------------------------------------- reduction

    def _find_divisor(self, term, gb_leads, by_pos, skip=-1):
        pos, mon = term
        for k in by_pos.get(pos, ()):
            if k != skip and mon_divides(gb_leads[k][1], mon):
                return k
        return None

    def _reduce(self, v, rep=None, quot=False, full=True, G=None, leads=None, by_pos=None, reps=None, skip=-1):
        """Divide v by the basis.  Returns (remainder, rep, quotients).

        ``rep`` is updated by subtracting multiples of the basis cofactors so
        that the invariant (vector = sum rep_l * generator_l) is preserved.
        ``quotients`` maps (basis index, monomial) to coefficients.
        """
        if G is None:
            G, leads, by_pos, reps = self.gb, self.leads, self._by_pos, self.reps
        key = self.order.key
        p = self.field.p
        v = dict(v)
        rem = {}
        qv = {} if quot else None
        while v:
            t = max(v, key=key)
            c = v[t]
            k = self._find_divisor(t, leads, by_pos, skip)
            if k is None:
                if not full:
                    rem.update(v)
                    break
                rem[t] = c
                del v[t]
                continue
            q = mon_div(t[1], leads[k][1])
            for (i, m), gc in G[k].items():
                tt = (i, tuple(x + y for x, y in zip(m, q)))
                val = v.get(tt, 0) - c * gc
                if p:
                    val %= p
                if val:
                    v[tt] = val
                else:
                    v.pop(tt, None)
            if rep is not None:
                rep = vec_add(rep, vec_mul_term(reps[k], q, 1, self.field), self.field, -c)
            if qv is not None:
                kk = (k, q)
                val = qv.get(kk, 0) + c
                if p:
                    val %= p
                qv[kk] = val
        return rem, rep, qv

    # -------------------------------------------------------------- buchberger

    def _run(self):
        ambient = self.ambient
        field = self.field
        key = self.order.key
        nv = self.ring.nvars
        one = (0,) * nv
        G = self.gb
        leads = self.leads
        reps = self.reps
        by_pos = self._by_pos
        pairs_by_deg: Dict[int, list] = defaultdict(list)
        pending = set()
        gens_by_deg: Dict[int, list] = defaultdict(list)
        for idx, g in enumerate(self.generators):
            if g:
                gens_by_deg[self.degrees[idx]].append(idx)
        for d in gens_by_deg:
            gens_by_deg[d].sort(key=lambda i: (i not in self.modulo, i))

        def add(h, hrep):
            lt = _lead(h, key)
            c = h[lt]
            if c != field.one:
                inv = field.inv(c)
                h = {t: (v * inv) % field.p if field.p else v * inv for t, v in h.items()}
                if hrep is not None:
                    hrep = {t: (v * inv) % field.p if field.p else v * inv for t, v in hrep.items()}
            n = len(G)
            G.append(h)
            leads.append(lt)
            if reps is not None:
                reps.append(hrep)
            pos, lm = lt
            for k in by_pos[pos]:
                lc = mon_lcm(leads[k][1], lm)
                pairs_by_deg[sum(lc) + ambient.twists[pos]].append((k, n))
                pending.add((k, n))
            by_pos[pos].append(n)

        def chain_criterion(i, j):
            pos = leads[i][0]
            lc = mon_lcm(leads[i][1], leads[j][1])
            for k in by_pos[pos]:
                if k == i or k == j:
                    continue
                if not mon_divides(leads[k][1], lc):
                    continue
                if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                    continue
                return True
            return False

        done_gen_degs = set()
        while True:
            cand = [d for d, pl in pairs_by_deg.items() if pl]
            cand += [d for d in gens_by_deg if d not in done_gen_degs]
            if not cand:
                break
            t = min(cand)
            plist = pairs_by_deg.pop(t, [])
            plist.sort()
            for (i, j) in plist:
                pending.discard((i, j))
                if chain_criterion(i, j):
                    continue
                lc = mon_lcm(leads[i][1], leads[j][1])
                qi = mon_div(lc, leads[i][1])
                qj = mon_div(lc, leads[j][1])
                s = vec_add(vec_mul_term(G[i], qi, 1, field), vec_mul_term(G[j], qj, 1, field), field, -1)
                srep = None
                if reps is not None:
                    srep = vec_add(vec_mul_term(reps[i], qi, 1, field), vec_mul_term(reps[j], qj, 1, field), field, -1)
                h, hrep, _ = self._reduce(s, srep, full=False)
                if h:
                    add(h, hrep)
            if t in gens_by_deg and t not in done_gen_degs:
                done_gen_degs.add(t)
                for idx in gens_by_deg[t]:
                    r0 = {(idx, one): field.one} if reps is not None else None
                    h, hrep, _ = self._reduce(self.generators[idx], r0, full=False)
                    if h:
                        add(h, hrep)
                        if idx not in self.modulo:
                            self.minimal.append(idx)
        self._interreduce()

    def _interreduce(self):
        """Turn the basis into the reduced Groebner basis."""
        G, leads, reps = self.gb, self.leads, self.reps
        keep = []
        for i, (pos, lm) in enumerate(leads):
            redundant = False
            for j, (pos2, lm2) in enumerate(leads):
                if j != i and pos2 == pos and mon_divides(lm2, lm) and (lm2 != lm or j < i):
                    redundant = True
                    break
            if not redundant:
                keep.append(i)
        G2 = [G[i] for i in keep]
        leads2 = [leads[i] for i in keep]
        reps2 = [reps[i] for i in keep] if reps is not None else None
        key = self.order.key
        order = sorted(range(len(G2)), key=lambda i: key(leads2[i]), reverse=True)
        G2 = [G2[i] for i in order]
        leads2 = [leads2[i] for i in order]
        if reps2 is not None:
            reps2 = [reps2[i] for i in order]
        by_pos: Dict[int, List[int]] = defaultdict(list)
        for i, (pos, _) in enumerate(leads2):
            by_pos[pos].append(i)
        for i in range(len(G2)):
            lt = leads2[i]
            c = G2[i][lt]
            tail = {t: v for t, v in G2[i].items() if t != lt}
            rep = reps2[i] if reps2 is not None else None
            r, rep, _ = self._reduce(tail, rep, G=G2, leads=leads2, by_pos=by_pos, reps=reps2, skip=i)
            r[lt] = c
            G2[i] = r
            if reps2 is not None:
                reps2[i] = rep
        self.gb[:] = G2
        self.leads[:] = leads2
        if reps is not None:
            self.reps[:] = reps2
        self._by_pos = by_pos

    # -------------------------------------------------------------- queries

    def normal_form(self, v: Vector) -> Vector:
        if self.ambient.vector_degree(v) is None:
            return {}
        return self._reduce(v)[0]

    def is_member(self, v: Vector) -> bool:
        if not v:
            return True
        return not self._reduce(v, full=False)[0]

    def lift(self, v: Vector) -> Optional[Vector]:
        """Cofactors a with v = sum_l a_l * generator_l, or None if v is not a member."""
        if self.reps is None:
            raise RingError("basis was built without cofactor tracking")
        rem, rep, _ = self._reduce(v, {}, full=False)
        if rem:
            return None
        # invariant: v - sum(rep) ... rep accumulates -(cofactors)
        return {t: (-c) % self.field.p if self.field.p else -c for t, c in rep.items()}

    def contains(self, other: "SubmoduleBasis") -> bool:
        return all(self.is_member(g) for g in other.gb)

    def equals(self, other: "SubmoduleBasis") -> bool:
        return self.contains(other) and other.contains(self)

    def is_zero(self) -> bool:
        return not self.gb

    def minimal_generators(self) -> List[Vector]:
        return [self.generators[i] for i in self.minimal]

    def check_buchberger(self) -> bool:
        """Re-verify post hoc that every S-vector of the basis reduces to zero."""
        field = self.field
        for i in range(len(self.gb)):
            for j in range(i + 1, len(self.gb)):
                if self.leads[i][0] != self.leads[j][0]:
                    continue
                lc = mon_lcm(self.leads[i][1], self.leads[j][1])
                s = vec_add(
                    vec_mul_term(self.gb[i], mon_div(lc, self.leads[i][1]), 1, field),
                    vec_mul_term(self.gb[j], mon_div(lc, self.leads[j][1]), 1, field),
                    field,
                    -1,
                )
                if self._reduce(s)[0]:
                    return False
        return True

    def syzygies(self, subset: Optional[Sequence[int]] = None) -> "SubmoduleBasis":
        return syzygies(self, subset)


# ------------------------------------------------------------------ functions


def groebner_basis(gens: Sequence[Vector], ambient: FreeModule, track: bool = True, **kw) -> SubmoduleBasis:
    return SubmoduleBasis(ambient, gens, track=track, **kw)


def normal_form(v: Vector, B: SubmoduleBasis) -> Vector:
    return B.normal_form(v)


def is_member(v: Vector, B: SubmoduleBasis) -> bool:
    return B.is_member(v)


def schreyer_syzygies(B: SubmoduleBasis, subset: Optional[Sequence[int]] = None) -> List[Vector]:
    """Generators of the syzygies among B.generators (restricted to ``subset``,
    re-indexed 0..len(subset)-1).  Requires cofactor tracking, and when a
    subset is given the basis cofactors must only involve that subset.

    Coordinates on ``B.modulo`` columns (ring relations) are projected away,
    so in quotient-ring mode the result generates the syzygies over R."""
    if B.reps is None:
        raise RingError("syzygies need a basis built with cofactor tracking")
    field = B.field
    p = field.p
    nv = B.ring.nvars
    one = (0,) * nv
    G, leads, T = B.gb, B.leads, B.reps
    r = len(B.generators)
    if subset is None:
        subset = [l for l in range(r) if l not in B.modulo]
    index = {l: k for k, l in enumerate(subset)}
    out: List[Vector] = []

    def translate(syzG: Dict) -> Vector:
        acc: Vector = {}
        for (k, m), c in syzG.items():
            if c:
                acc = vec_add(acc, vec_mul_term(T[k], m, 1, field), field, c)
        return acc

    by_pos = defaultdict(list)
    for i, (pos, _) in enumerate(leads):
        by_pos[pos].append(i)
    for i in range(len(G)):
        pos, lmi = leads[i]
        cands = []
        for j in by_pos[pos]:
            if j <= i:
                continue
            lc = mon_lcm(lmi, leads[j][1])
            cands.append((j, mon_div(lc, lmi), lc))
        for a, (j, qi, lc) in enumerate(cands):
            dominated = False
            for b, (j2, qi2, _) in enumerate(cands):
                if b != a and mon_divides(qi2, qi) and (qi2 != qi or j2 < j):
                    dominated = True
                    break
            if dominated:
                continue
            qj = mon_div(lc, leads[j][1])
            s = vec_add(vec_mul_term(G[i], qi, 1, field), vec_mul_term(G[j], qj, 1, field), field, -1)
            rem, _, quot = B._reduce(s, quot=True, full=False)
            if rem:
                raise RingError("internal error: S-vector of a Groebner basis did not reduce to zero")
            syzG = {(i, qi): field.one, (j, qj): field(-1)}
            for kk, c in quot.items():
                val = syzG.get(kk, 0) - c
                syzG[kk] = val % p if p else val
            v = translate(syzG)
            if v:
                out.append(v)
    for l in list(subset) + sorted(B.modulo):
        f = B.generators[l]
        rem, _, quot = B._reduce(f, quot=True, full=False)
        if rem:
            raise RingError("internal error: generator not reduced to zero by its own basis")
        v = vec_add({(l, one): field.one}, translate(quot), field, -1)
        if v:
            out.append(v)
    result = []
    for v in out:
        w = {}
        for (l, m), c in v.items():
            if l in B.modulo:
                continue
            if l not in index:
                raise RingError("syzygy involves generators outside the requested subset")
            w[(index[l], m)] = c
        if w:
            result.append(w)
    return result


def syzygies(B: SubmoduleBasis, subset: Optional[Sequence[int]] = None, track: bool = True) -> SubmoduleBasis:
    """The syzygy module of the generators of B as a submodule of the free
    module on those generators (twists = generator degrees)."""
    if subset is None:
        subset = [l for l in range(len(B.generators)) if l not in B.modulo]
    twists = [B.degrees[l] for l in subset]
    if any(d is None for d in twists):
        raise RingError("zero generator without declared degree")
    F = FreeModule(B.ring, twists)
    vecs = schreyer_syzygies(B, subset)
    return SubmoduleBasis(F, vecs, track=track)


def ring_relation_columns(ambient: FreeModule, ring_relations) -> List[Vector]:
    """f * e_i for every relation f and every position i."""
    out = []
    for f in ring_relations:
        fd = f.as_dict() if hasattr(f, "as_dict") else dict(f)
        if not fd:
            continue
        degs = {sum(m) for m in fd}
        if len(degs) != 1:
            raise RingError("inhomogeneous ring relation")
        for i in range(ambient.rank):
            out.append({(i, m): c for m, c in fd.items()})
    return out


def quotient_ring_mode(B: SubmoduleBasis, ring_relations) -> SubmoduleBasis:
    """The same generators, computed modulo f * e_i for every ring relation f,
    i.e. over R = S/(ring_relations).  The ring-relation columns are appended
    after the original generators and marked as ``modulo``."""
    extra = ring_relation_columns(B.ambient, ring_relations)
    n = len(B.generators)
    return SubmoduleBasis(
        B.ambient,
        list(B.generators) + extra,
        order=B.order,
        track=B.track,
        degrees=list(B.degrees) + [None] * len(extra),
        modulo=range(n, n + len(extra)),
    )
