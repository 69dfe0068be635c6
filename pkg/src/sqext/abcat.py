"""Finitely presented graded modules and degree-0 morphisms between them.

A ``Presentation`` is ``F / rel`` for a twisted free module F; over a
hypersurface (or any quotient) ring R = S/(f_1, ...) the ring relations are
carried separately and every f * e_i is treated as an extra relation.  A
``GradedMorphism`` stores the image of every generator as a vector of the
target's free module.

Everything the category needs is decidable through Groebner bases: kernels
and images via syzygies, equality of morphisms via membership, finite length
via lead terms, and the degree-0 part of Hom via linear algebra on degree
slices.
"""

from __future__ import annotations

from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .groebner import SubmoduleBasis, ring_relation_columns, schreyer_syzygies
from .ring import (
    FreeModule,
    GradedPoly,
    PolyRing,
    RingError,
    Vector,
    mon_divides,
    monomials_of_degree,
    vec_add,
    vec_mul_poly,
    vec_mul_term,
    vec_scale,
    vec_shift,
)


class CategoryError(RingError):
    pass


def _poly_dict(f) -> dict:
    if isinstance(f, GradedPoly):
        return f.as_dict()
    return dict(f)


class Presentation:
    """The graded module F / <relations> (plus ring relations)."""

    def __init__(self, free: FreeModule, relations: Sequence[Vector] = (), ring_relations=(), name: str = ""):
        self.free = free
        self.ring: PolyRing = free.ring
        self.field = free.ring.field
        rels = []
        for r in relations:
            r = {t: c for t, c in r.items() if c}
            if r:
                free.vector_degree(r)
                rels.append(r)
        self.relations: Tuple[Vector, ...] = tuple(rels)
        self.ring_relations = tuple(_poly_dict(f) for f in ring_relations if _poly_dict(f))
        self.name = name
        self._basis_cache: Dict[int, tuple] = {}

    # ------------------------------------------------------------ basics

    @property
    def twists(self) -> Tuple[int, ...]:
        return self.free.twists

    @property
    def rank(self) -> int:
        return self.free.rank

    def __repr__(self):
        nm = f"{self.name}: " if self.name else ""
        return f"Presentation({nm}twists={list(self.twists)}, {len(self.relations)} relations)"

    @cached_property
    def all_relations(self) -> Tuple[Vector, ...]:
        return self.relations + tuple(ring_relation_columns(self.free, self.ring_relations))

    @cached_property
    def gb(self) -> SubmoduleBasis:
        return SubmoduleBasis(self.free, list(self.all_relations), track=False)

    def like(self, free: FreeModule, relations: Sequence[Vector], name: str = "") -> "Presentation":
        """A presentation over the same ring (keeps ring relations)."""
        return Presentation(free, relations, self.ring_relations, name=name)

    def is_member(self, v: Vector) -> bool:
        return self.gb.is_member(v)

    def normal_form(self, v: Vector) -> Vector:
        return self.gb.normal_form(v)

    # ------------------------------------------------------------ degree slices

    def basis(self, t: int) -> Tuple[tuple, Dict]:
        """Standard monomials (pos, mon) spanning M_t and their index map."""
        hit = self._basis_cache.get(t)
        if hit is not None:
            return hit
        leads_by_pos: Dict[int, list] = {}
        for pos, lm in self.gb.leads:
            leads_by_pos.setdefault(pos, []).append(lm)
        terms = []
        for i, a in enumerate(self.twists):
            ls = leads_by_pos.get(i, ())
            for m in monomials_of_degree(self.ring.nvars, t - a):
                if not any(mon_divides(l, m) for l in ls):
                    terms.append((i, m))
        index = {term: k for k, term in enumerate(terms)}
        hit = (tuple(terms), index)
        self._basis_cache[t] = hit
        return hit

    def hilbert(self, t: int) -> int:
        return len(self.basis(t)[0])

    def coords(self, v: Vector, t: int) -> np.ndarray:
        """Coordinates of the class of v (homogeneous of degree t) in basis(t)."""
        terms, index = self.basis(t)
        out = linalg.zero_vector(len(terms), self.field)
        if not v:
            return out
        d = self.free.vector_degree(v)
        if d != t:
            raise CategoryError(f"vector of degree {d} where degree {t} was expected")
        for term, c in self.normal_form(v).items():
            out[index[term]] = c
        return out

    def from_coords(self, u, t: int) -> Vector:
        terms, _ = self.basis(t)
        return {terms[k]: self.field(u[k]) for k in range(len(terms)) if u[k]}

    def mult_matrix(self, f, source_deg: int) -> np.ndarray:
        """Matrix of multiplication by the homogeneous poly f: M_s -> M_{s+deg f}."""
        f = _poly_dict(f)
        src, _ = self.basis(source_deg)
        if not f:
            return linalg.zeros(0, len(src), self.field)
        e = source_deg + sum(next(iter(f)))
        tgt, _ = self.basis(e)
        A = linalg.zeros(len(tgt), len(src), self.field)
        for k, (i, m) in enumerate(src):
            v = vec_mul_poly({(i, m): self.field.one}, f, self.field)
            A[:, k] = self.coords(v, e)
        return A

    # ------------------------------------------------------------ structure

    def is_zero(self) -> bool:
        return all(self.is_member(self.free.basis_vector(i)) for i in range(self.rank))

    def generator_vector(self, i: int) -> Vector:
        return self.free.basis_vector(i)

    def to_json(self) -> dict:
        from .ring import format_poly, vec_component

        rows = []
        for r in self.relations:
            rows.append([format_poly(vec_component(r, i), self.ring) for i in range(self.rank)])
        out = {"twists": list(self.twists), "relations": rows}
        if self.ring_relations:
            out["ring_relations"] = [format_poly(f, self.ring) for f in self.ring_relations]
        return out


# ------------------------------------------------------------------ constructors


def free_module(ring: PolyRing, twists: Sequence[int], ring_relations=()) -> Presentation:
    return Presentation(FreeModule(ring, twists), (), ring_relations)


def zero_module(ring: PolyRing, ring_relations=()) -> Presentation:
    return Presentation(FreeModule(ring, []), (), ring_relations)


def cyclic_module(ring: PolyRing, ideal_gens, twist: int = 0, ring_relations=()) -> Presentation:
    """S(-twist) / I for an ideal given by homogeneous polys or strings."""
    rels = []
    for g in ideal_gens:
        f = ring.poly(g).as_dict()
        rels.append({(0, m): c for m, c in f.items()})
    return Presentation(FreeModule(ring, [twist]), rels, ring_relations)


def from_matrix(ring: PolyRing, twists: Sequence[int], rows, ring_relations=()) -> Presentation:
    """Presentation from relation rows (one entry per generator)."""
    free = FreeModule(ring, twists)
    rels = []
    for j, row in enumerate(rows):
        if len(row) != len(twists):
            raise CategoryError(f"relation row {j} has {len(row)} entries, expected {len(twists)}")
        v = {}
        for i, f in enumerate(row):
            for m, c in ring.poly(f).as_dict().items():
                v[(i, m)] = c
        if not free.is_homogeneous(v):
            raise CategoryError(f"relation row {j} is not homogeneous")
        rels.append(v)
    return Presentation(free, rels, ring_relations)


# ------------------------------------------------------------------ morphisms


class GradedMorphism:
    """A degree-0 map source -> target given by generator images."""

    def __init__(self, source: Presentation, target: Presentation, images: Sequence[Vector], check: bool = False):
        if len(images) != source.rank:
            raise CategoryError("need one image per source generator")
        imgs = []
        for j, v in enumerate(images):
            v = {t: c for t, c in v.items() if c}
            if v and target.free.vector_degree(v) != source.twists[j]:
                raise CategoryError(f"image of generator {j} has the wrong degree")
            imgs.append(v)
        self.source = source
        self.target = target
        self.images: Tuple[Vector, ...] = tuple(imgs)
        if check and not self.is_well_defined():
            raise CategoryError("morphism does not map relations into relations")

    def __repr__(self):
        return f"GradedMorphism({self.source!r} -> {self.target!r})"

    @property
    def field(self):
        return self.target.field

    def apply(self, v: Vector) -> Vector:
        field = self.field
        out: Vector = {}
        for (i, m), c in v.items():
            out = vec_add(out, vec_mul_term(self.images[i], m, 1, field), field, c)
        return out

    def is_well_defined(self) -> bool:
        return all(self.target.is_member(self.apply(r)) for r in self.source.all_relations)

    def is_zero(self) -> bool:
        return all(self.target.is_member(v) for v in self.images)

    def equals(self, other: "GradedMorphism") -> bool:
        return (self - other).is_zero()

    def __add__(self, other: "GradedMorphism") -> "GradedMorphism":
        return GradedMorphism(
            self.source, self.target, [vec_add(a, b, self.field) for a, b in zip(self.images, other.images)]
        )

    def __sub__(self, other: "GradedMorphism") -> "GradedMorphism":
        return GradedMorphism(
            self.source, self.target, [vec_add(a, b, self.field, -1) for a, b in zip(self.images, other.images)]
        )

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "GradedMorphism":
        return GradedMorphism(self.source, self.target, [vec_scale(a, c, self.field) for a in self.images])

    def compose(self, first: "GradedMorphism") -> "GradedMorphism":
        """self o first."""
        return GradedMorphism(first.source, self.target, [self.apply(v) for v in first.images])

    def __matmul__(self, first: "GradedMorphism") -> "GradedMorphism":
        return self.compose(first)

    def slice_matrix(self, t: int) -> np.ndarray:
        """The k-linear map M_t -> N_t in the standard bases."""
        src, _ = self.source.basis(t)
        tgt, _ = self.target.basis(t)
        A = linalg.zeros(len(tgt), len(src), self.field)
        for k, (i, m) in enumerate(src):
            A[:, k] = self.target.coords(vec_mul_term(self.images[i], m, 1, self.field), t)
        return A

    def matrix(self) -> List[List[GradedPoly]]:
        """Entries m_ij with image_j = sum_i m_ij e_i (target rows, source columns)."""
        ring = self.target.ring
        rows = [[{} for _ in range(self.source.rank)] for _ in range(self.target.rank)]
        for j, v in enumerate(self.images):
            for (i, m), c in v.items():
                rows[i][j][m] = c
        return [[GradedPoly(ring, e) for e in row] for row in rows]


def identity(M: Presentation) -> GradedMorphism:
    return GradedMorphism(M, M, [M.free.basis_vector(i) for i in range(M.rank)])


def zero_map(M: Presentation, N: Presentation) -> GradedMorphism:
    return GradedMorphism(M, N, [{} for _ in range(M.rank)])


# ------------------------------------------------------------------ subquotients


def subquotient(F_pres: Presentation, gens: Sequence[Vector], degrees: Optional[Sequence[int]] = None, minimal: bool = True):
    """Present the submodule of F_pres generated by the classes of ``gens``.

    Returns (P, inclusion P -> F_pres).  With ``minimal`` only a minimal
    subset of the generators is kept (graded Nakayama, decided during the
    Groebner pass), and the relations are minimized as well.
    """
    free = F_pres.free
    rels = list(F_pres.all_relations)
    gens = [{t: c for t, c in g.items() if c} for g in gens]
    if degrees is None:
        degrees = [free.vector_degree(g) for g in gens]
    nr = len(rels)
    if minimal:
        B = SubmoduleBasis(
            free,
            rels + gens,
            track=False,
            degrees=[None] * nr + list(degrees),
            modulo=range(nr),
        )
        chosen = [i - nr for i in B.minimal]
        chosen.sort()
    else:
        chosen = [i for i, g in enumerate(gens) if g or degrees[i] is not None]
    sel = [gens[i] for i in chosen]
    sel_deg = [degrees[i] for i in chosen]
    if any(d is None for d in sel_deg):
        raise CategoryError("zero generator of unknown degree")
    B2 = SubmoduleBasis(free, sel + rels, track=True, degrees=sel_deg + [None] * nr)
    k = len(sel)
    syz = schreyer_syzygies(B2)
    proj = []
    for v in syz:
        w = {t: c for t, c in v.items() if t[0] < k}
        if w:
            proj.append(w)
    P_free = FreeModule(F_pres.ring, sel_deg)
    if minimal and proj:
        ringcols = ring_relation_columns(P_free, F_pres.ring_relations)
        BR = SubmoduleBasis(P_free, ringcols + proj, track=False, modulo=range(len(ringcols)))
        proj = [proj[i - len(ringcols)] for i in sorted(BR.minimal)]
    P = Presentation(P_free, proj, F_pres.ring_relations)
    return P, GradedMorphism(P, F_pres, sel)


def quotient(M: Presentation, gens: Sequence[Vector]) -> Tuple[Presentation, GradedMorphism]:
    """M / <gens> with the projection."""
    Q = M.like(M.free, list(M.relations) + [g for g in gens if g])
    return Q, GradedMorphism(M, Q, [M.free.basis_vector(i) for i in range(M.rank)])


def minimal_presentation(M: Presentation):
    """(M', phi: M -> M', psi: M' -> M) with M' minimally generated, phi and psi inverse isos."""
    gens = [M.free.basis_vector(i) for i in range(M.rank)]
    P, psi = subquotient(M, gens, degrees=list(M.twists))
    # express every old generator through the chosen ones
    phi = lift(identity(M), psi)
    return P, phi, psi


# ------------------------------------------------------------------ degree-0 Hom by linear algebra


class HomSpace:
    """Linear-algebra model of Hom_A(X, Y)_0 (degree-0 morphisms).

    An unknown morphism is the tuple of coordinates of the images of the
    generators of X in Y_{a_j}; relations of X give linear constraints.
    """

    def __init__(self, X: Presentation, Y: Presentation):
        self.X, self.Y = X, Y
        self.field = Y.field
        self.offsets = [0]
        for a in X.twists:
            self.offsets.append(self.offsets[-1] + Y.hilbert(a))
        self.dim_ambient = self.offsets[-1]

    def block(self, u, j):
        return u[self.offsets[j]:self.offsets[j + 1]]

    def to_morphism(self, u) -> GradedMorphism:
        X, Y = self.X, self.Y
        return GradedMorphism(X, Y, [Y.from_coords(self.block(u, j), a) for j, a in enumerate(X.twists)])

    def from_morphism(self, h: GradedMorphism) -> np.ndarray:
        u = linalg.zero_vector(self.dim_ambient, self.field)
        for j, a in enumerate(self.X.twists):
            u[self.offsets[j]:self.offsets[j + 1]] = self.Y.coords(h.images[j], a)
        return u

    @cached_property
    def constraints(self) -> np.ndarray:
        X, Y = self.X, self.Y
        blocks = []
        for r in X.all_relations:
            e = X.free.vector_degree(r)
            A = linalg.zeros(Y.hilbert(e), self.dim_ambient, self.field)
            for j, a in enumerate(X.twists):
                f = {m: c for (i, m), c in r.items() if i == j}
                if f and self.offsets[j + 1] > self.offsets[j]:
                    A[:, self.offsets[j]:self.offsets[j + 1]] = Y.mult_matrix(f, a)
            blocks.append(A)
        if not blocks:
            return linalg.zeros(0, self.dim_ambient, self.field)
        return np.vstack(blocks)

    def postcompose_matrix(self, g: GradedMorphism) -> np.ndarray:
        """Matrix of h -> g o h from this space's coordinates to HomSpace(X, g.target)'s."""
        other = HomSpace(self.X, g.target)
        A = linalg.zeros(other.dim_ambient, self.dim_ambient, self.field)
        for j, a in enumerate(self.X.twists):
            A[other.offsets[j]:other.offsets[j + 1], self.offsets[j]:self.offsets[j + 1]] = g.slice_matrix(a)
        return A

    @cached_property
    def kernel_basis(self) -> list:
        return linalg.nullspace(self.constraints, self.field)

    def basis(self) -> List[GradedMorphism]:
        return [self.to_morphism(u) for u in self.kernel_basis]

    def dim(self) -> int:
        return len(self.kernel_basis)


def hom_group_basis(M: Presentation, N: Presentation) -> List[GradedMorphism]:
    """A k-basis of Hom_A(M, N) (degree-0 morphisms)."""
    return HomSpace(M, N).basis()


# ------------------------------------------------------------------ kernels, images, lifts


def kernel(f: GradedMorphism) -> Tuple[Presentation, GradedMorphism]:
    """ker f with its inclusion into f.source."""
    M, N = f.source, f.target
    r = M.rank
    nrel = N.all_relations
    gens = list(f.images) + list(nrel)
    degs = list(M.twists) + [None] * len(nrel)
    B = SubmoduleBasis(N.free, gens, track=True, degrees=degs)
    pre = []
    for v in schreyer_syzygies(B):
        w = {t: c for t, c in v.items() if t[0] < r}
        if w:
            pre.append(w)
    return subquotient(M, pre)


def image_coker(f: GradedMorphism):
    """(img f, coker f, img f -> target, target -> coker)."""
    N = f.target
    I, inc = subquotient(N, list(f.images), degrees=list(f.source.twists))
    Q, proj = quotient(N, list(f.images))
    return I, Q, inc, proj


def image(f: GradedMorphism) -> Tuple[Presentation, GradedMorphism]:
    I, _, inc, _ = image_coker(f)
    return I, inc


def cokernel(f: GradedMorphism) -> Tuple[Presentation, GradedMorphism]:
    return quotient(f.target, list(f.images))


def is_mono(f: GradedMorphism) -> bool:
    K, _ = kernel(f)
    return K.is_zero()


def is_epi(f: GradedMorphism) -> bool:
    Q, _ = cokernel(f)
    return Q.is_zero()


def is_iso(f: GradedMorphism) -> bool:
    return is_mono(f) and is_epi(f)


def lift(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """h with g o h = f, for f: X -> Z and g: Y -> Z.

    First tries cofactor lifting through a Groebner basis of g's image; when
    that choice is not well defined on X (possible only if g is not mono and
    X is not free) it solves the degree-0 linear system instead.
    """
    X, Z = f.source, f.target
    Y = g.source
    ny = Y.rank
    B = SubmoduleBasis(Z.free, list(g.images) + list(Z.all_relations), track=True,
                       degrees=list(Y.twists) + [None] * len(Z.all_relations))
    imgs = []
    for v in f.images:
        a = B.lift(v) if v else {}
        if a is None:
            raise CategoryError("no lift exists")
        imgs.append({t: c for t, c in a.items() if t[0] < ny})
    h = GradedMorphism(X, Y, imgs)
    if not X.all_relations or h.is_well_defined():
        return h
    H = HomSpace(X, Y)
    Hz = HomSpace(X, Z)
    A = np.vstack([H.postcompose_matrix(g), H.constraints])
    rhs = np.concatenate([Hz.from_morphism(f), linalg.zero_vector(H.constraints.shape[0], f.field)])
    u = linalg.solve(A, rhs, f.field)
    if u is None:
        raise CategoryError("no lift exists")
    return H.to_morphism(u)


def extend(f: GradedMorphism, i: GradedMorphism) -> GradedMorphism:
    """h with h o i = f, for i: X -> Y and f: X -> Z (extension along i)."""
    X, Y, Z = i.source, i.target, f.target
    H = HomSpace(Y, Z)
    Hx = HomSpace(X, Z)
    # h -> h o i is linear in the coordinates of h
    A = linalg.zeros(Hx.dim_ambient, H.dim_ambient, f.field)
    for k in range(H.dim_ambient):
        e = linalg.zero_vector(H.dim_ambient, f.field)
        e[k] = f.field.one
        A[:, k] = Hx.from_morphism(H.to_morphism(e).compose(i))
    M = np.vstack([A, H.constraints])
    rhs = np.concatenate([Hx.from_morphism(f), linalg.zero_vector(H.constraints.shape[0], f.field)])
    u = linalg.solve(M, rhs, f.field)
    if u is None:
        raise CategoryError("no extension exists")
    return H.to_morphism(u)


# ------------------------------------------------------------------ sums, pullbacks, pushouts


def direct_sum(M: Presentation, N: Presentation):
    """(M + N, inj_M, inj_N, proj_M, proj_N)."""
    r = M.rank
    free = M.free.direct_sum(N.free)
    rels = list(M.relations) + [vec_shift(v, r) for v in N.relations]
    P = Presentation(free, rels, M.ring_relations or N.ring_relations)
    nv = M.ring.nvars
    one = (0,) * nv
    fo = M.field.one
    inj_M = GradedMorphism(M, P, [{(i, one): fo} for i in range(r)])
    inj_N = GradedMorphism(N, P, [{(r + i, one): fo} for i in range(N.rank)])
    proj_M = GradedMorphism(P, M, [{(i, one): fo} for i in range(r)] + [{} for _ in range(N.rank)])
    proj_N = GradedMorphism(P, N, [{} for _ in range(r)] + [{(i, one): fo} for i in range(N.rank)])
    return P, inj_M, inj_N, proj_M, proj_N


def hstack(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """(f, g): X + Y -> Z."""
    P, _, _, _, _ = direct_sum(f.source, g.source)
    return GradedMorphism(P, f.target, list(f.images) + list(g.images))


def vstack(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """(f; g): Z -> X + Y."""
    P, _, _, _, _ = direct_sum(f.target, g.target)
    r = f.target.rank
    return GradedMorphism(f.source, P, [vec_add(a, vec_shift(b, r), f.field) for a, b in zip(f.images, g.images)])


def pullback(f: GradedMorphism, g: GradedMorphism):
    """(P, p_X, p_Y) with f o p_X = g o p_Y."""
    if f.target.twists != g.target.twists:
        raise CategoryError("pullback needs a common target")
    d = hstack(f, -g)
    K, inc = kernel(d)
    _, _, _, pX, pY = direct_sum(f.source, g.source)
    pX = GradedMorphism(d.source, f.source, pX.images)
    pY = GradedMorphism(d.source, g.source, pY.images)
    return K, pX.compose(inc), pY.compose(inc)


def pushout(f: GradedMorphism, g: GradedMorphism):
    """(P, i_X, i_Y) with i_X o f = i_Y o g."""
    if f.source.twists != g.source.twists:
        raise CategoryError("pushout needs a common source")
    d = vstack(f, -g)
    Q, proj = cokernel(d)
    _, iX, iY, _, _ = direct_sum(f.target, g.target)
    iX = GradedMorphism(f.target, d.target, iX.images)
    iY = GradedMorphism(g.target, d.target, iY.images)
    return Q, proj.compose(iX), proj.compose(iY)


def intersect(i: GradedMorphism, j: GradedMorphism) -> Tuple[Presentation, GradedMorphism]:
    """U n V inside W for monos i: U -> W, j: V -> W."""
    if not (is_mono(i) and is_mono(j)):
        raise CategoryError("intersect needs monomorphisms")
    P, pU, _ = pullback(i, j)
    return P, i.compose(pU)


# ------------------------------------------------------------------ grading


def hilbert_function(M: Presentation, lo: int, hi: int) -> List[int]:
    if lo > hi:
        raise CategoryError("empty degree range")
    return [M.hilbert(t) for t in range(lo, hi + 1)]


def truncate(M: Presentation, d: int) -> Tuple[Presentation, GradedMorphism]:
    """M_{>=d} with its inclusion into M."""
    gens = []
    degs = []
    for term in M.basis(d)[0]:
        gens.append({term: M.field.one})
        degs.append(d)
    for i, a in enumerate(M.twists):
        if a > d:
            gens.append(M.free.basis_vector(i))
            degs.append(a)
    return subquotient(M, gens, degrees=degs)


def is_in_C(M: Presentation) -> bool:
    """Finite length: every generator position has a pure power of each
    variable among its lead terms."""
    nv = M.ring.nvars
    pure = [set() for _ in range(M.rank)]
    for pos, lm in M.gb.leads:
        nz = [k for k, e in enumerate(lm) if e]
        if len(nz) == 1:
            pure[pos].add(nz[0])
        elif not nz:
            pure[pos].update(range(nv))
    return all(len(s) == nv for s in pure)


def top_degree(M: Presentation) -> Optional[int]:
    """Largest degree with M_t != 0 for M of finite length; None for M = 0."""
    if not is_in_C(M):
        raise CategoryError("module does not have finite length")
    nv = M.ring.nvars
    hi = None
    for i, a in enumerate(M.twists):
        bound = a
        for k in range(nv):
            e = min((lm[k] for p, lm in M.gb.leads if p == i and lm[k] == sum(lm)), default=0)
            bound += max(e - 1, 0)
        hi = bound if hi is None else max(hi, bound)
    if hi is None:
        return None
    for t in range(hi, min(M.twists) - 1, -1):
        if M.hilbert(t):
            return t
    return None


def multiplication_by_vars(M: Presentation, T_gens: Sequence[Vector] = ()) -> GradedMorphism:
    """v -> (x_0 v, ..., x_n v) from M into (M/T)(1)^(n+1)."""
    Q = M.like(M.free, list(M.relations) + [g for g in T_gens if g])
    nv = M.ring.nvars
    r = M.rank
    shifted = FreeModule(M.ring, [a - 1 for a in M.twists] * nv)
    rels = []
    for k in range(nv):
        rels += [vec_shift(v, k * r) for v in Q.relations]
    target = M.like(shifted, rels)
    images = []
    for i in range(r):
        v = {}
        for k in range(nv):
            v[(k * r + i, M.ring.var(k))] = M.field.one
        images.append(v)
    return GradedMorphism(M, target, images)


def torsion_HC(M: Presentation) -> Tuple[Presentation, GradedMorphism]:
    """The largest finite-length submodule (0 :_M m^infinity) with its inclusion."""
    T: List[Vector] = []
    while True:
        _, inc = kernel(multiplication_by_vars(M, T))
        span = SubmoduleBasis(M.free, list(M.all_relations) + T, track=False)
        new = [v for v in inc.images if v]
        if all(span.is_member(v) for v in new):
            break
        T = new
    if not T:
        Z = zero_module(M.ring, M.ring_relations)
        return Z, zero_map(Z, M)
    return subquotient(M, T)


def presentation_map(M: Presentation) -> GradedMorphism:
    """The map F_1 -> F_0 whose cokernel is M (F_1 free on all relations)."""
    rels = M.all_relations
    F0 = free_module(M.ring, M.twists)
    F1 = free_module(M.ring, [M.free.vector_degree(r) for r in rels])
    return GradedMorphism(F1, F0, list(rels))


def hom_free_module(F: Presentation, N: Presentation) -> Presentation:
    """Hom(F, N) = sum_j N(a_j) for F free with twists a_j; generator (j, i) sits at j * rank N + i."""
    nN = N.rank
    return N.like(
        FreeModule(N.ring, [b - a for a in F.twists for b in N.twists]),
        [vec_shift(v, j * nN) for j in range(F.rank) for v in N.relations],
    )


def hom_free_map(d: GradedMorphism, N: Presentation) -> GradedMorphism:
    """Hom(d, N): Hom(F', N) -> Hom(F, N) for d: F -> F' between free modules."""
    F, Fp = d.source, d.target
    src, tgt = hom_free_module(Fp, N), hom_free_module(F, N)
    nN = N.rank
    images = [dict() for _ in range(Fp.rank * nN)]
    for j, v in enumerate(d.images):
        for (l, m), c in v.items():
            for i in range(nN):
                img = images[l * nN + i]
                key = (j * nN + i, m)
                img[key] = N.field(img.get(key, 0) + c)
    return GradedMorphism(src, tgt, [{t: c for t, c in img.items() if c} for img in images])


def hom_element_to_images(v: Vector, M: Presentation, N: Presentation) -> List[Vector]:
    """Split an element of Hom(F_0(M), N) into the images of M's generators."""
    nN = N.rank
    out = [dict() for _ in range(M.rank)]
    for (pos, m), c in v.items():
        out[pos // nN][(pos % nN, m)] = c
    return out


def hom_module(M: Presentation, N: Presentation) -> Tuple[Presentation, GradedMorphism]:
    """The graded module Hom(M, N) = ker(Hom(F_0, N) -> Hom(F_1, N)).

    Returns the presentation together with its inclusion into
    Hom(F_0, N) (see ``hom_element_to_images``).  Generators may sit in
    negative degrees.
    """
    d = presentation_map(M)
    if not M.all_relations:
        H0 = hom_free_module(d.target, N)
        return H0, identity(H0)
    return kernel(hom_free_map(d, N))
