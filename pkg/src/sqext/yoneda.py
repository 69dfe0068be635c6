"""Yoneda extensions: validation, splicing, pullback/pushout actions, Baer sums,
cocycle classes, the map from the colimit of Ext_A into the quotient, and the
constructive replacement of complexes by exact torsion-free subcomplexes.

An extension 0 <- M <- G_c <- ... <- G_1 <- N <- 0 is stored through its
maps ``maps[0]: N -> G_1``, ..., ``maps[c]: G_c -> M``; ``objects[0]`` is N
and ``objects[c + 1]`` is M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .abcat import (
    CategoryError,
    GradedMorphism,
    Presentation,
    direct_sum,
    identity,
    image,
    intersect,
    is_epi,
    is_in_C,
    is_mono,
    kernel,
    lift,
    pullback,
    pushout,
    quotient,
    subquotient,
    top_degree,
    torsion_HC,
    vstack,
)
from .homres import ExtGroup, FreeResolution, free_resolution
from .ring import vec_shift
from .serre import QuotientExtResult, SerreContext, almost_complement, connecting_matrix, ext_quotient


def same_module(A: Presentation, B: Presentation) -> bool:
    """Structural equality of presentations: same generators and the same relation module."""
    if A is B:
        return True
    return (
        A.ring == B.ring
        and A.twists == B.twists
        and tuple(A.ring_relations) == tuple(B.ring_relations)
        and A.gb.equals(B.gb)
    )


def _rebind(f: GradedMorphism, source=None, target=None) -> GradedMorphism:
    return GradedMorphism(source or f.source, target or f.target, f.images)


def homology(f_in: GradedMorphism, f_out: GradedMorphism) -> Presentation:
    """ker f_out / img f_in at the middle object."""
    _, kinc = kernel(f_out)
    Q, _ = quotient(f_out.source, list(f_in.images))
    H, _ = subquotient(Q, list(kinc.images), degrees=list(kinc.source.twists))
    return H


def _is_exact_at(f_in: GradedMorphism, f_out: GradedMorphism) -> bool:
    Y = f_out.source
    _, kinc = kernel(f_out)
    B = Y.like(Y.free, list(Y.relations) + [v for v in f_in.images if v])
    return all(B.is_member(v) for v in kinc.images)


class ExtensionComplex:
    """0 <- M <- G_c <- ... <- G_1 <- N <- 0, checked to be a complex.

    ``exact_flags[i]`` refers to ``objects[i]``: injectivity at N, vanishing
    homology at each G_i, surjectivity at M.
    """

    def __init__(self, maps: Sequence[GradedMorphism], require_exact: bool = False):
        maps = list(maps)
        if len(maps) < 2:
            raise CategoryError("an extension needs at least one middle object")
        for i in range(len(maps) - 1):
            if maps[i].target is not maps[i + 1].source:
                if not same_module(maps[i].target, maps[i + 1].source):
                    raise CategoryError(f"maps {i} and {i + 1} are not composable")
                maps[i + 1] = _rebind(maps[i + 1], source=maps[i].target)
        for i in range(len(maps) - 1):
            if not maps[i + 1].compose(maps[i]).is_zero():
                raise CategoryError(f"composite of maps {i} and {i + 1} is not zero")
        self.maps = maps
        self.objects = [maps[0].source] + [f.target for f in maps]
        self._flags: Optional[List[bool]] = None
        if require_exact and not self.is_exact():
            raise CategoryError(f"not exact at position {self.exact_flags.index(False)}")

    @property
    def c(self) -> int:
        return len(self.maps) - 1

    @property
    def N(self) -> Presentation:
        return self.objects[0]

    @property
    def M(self) -> Presentation:
        return self.objects[-1]

    def G(self, i: int) -> Presentation:
        return self.objects[i]

    @property
    def exact_flags(self) -> List[bool]:
        if self._flags is None:
            flags = [is_mono(self.maps[0])]
            for i in range(1, self.c + 1):
                flags.append(_is_exact_at(self.maps[i - 1], self.maps[i]))
            flags.append(is_epi(self.maps[-1]))
            self._flags = flags
        return self._flags

    def is_exact(self) -> bool:
        return all(self.exact_flags)

    def homology_modules(self) -> List[Presentation]:
        """Homology at every position, N and M included."""
        out = [kernel(self.maps[0])[0]]
        for i in range(1, self.c + 1):
            out.append(homology(self.maps[i - 1], self.maps[i]))
        out.append(quotient(self.M, list(self.maps[-1].images))[0])
        return out

    def __repr__(self):
        return f"ExtensionComplex(c={self.c}, M={self.M!r}, N={self.N!r})"


def make_extension(maps: Sequence[GradedMorphism]) -> ExtensionComplex:
    """Validated exact extension; raises CategoryError naming the first non-exact position."""
    return ExtensionComplex(maps, require_exact=True)


def split_extension(M: Presentation, N: Presentation) -> ExtensionComplex:
    """0 <- M <- M + N <- N <- 0."""
    _, _, iN, pM, _ = direct_sum(M, N)
    return ExtensionComplex([iN, pM])


# ------------------------------------------------------------------ Yoneda operations


def yoneda_compose(e1: ExtensionComplex, e2: ExtensionComplex) -> ExtensionComplex:
    """Splice e1 in Ext^c(M, N) with e2 in Ext^c'(N, L) into Ext^(c+c')(M, L)."""
    if not same_module(e1.N, e2.M):
        raise CategoryError("endpoint mismatch: the tail of the first extension must be the head of the second")
    head2 = _rebind(e2.maps[-1], target=e1.N)
    joint = e1.maps[0].compose(head2)
    return ExtensionComplex(e2.maps[:-1] + [joint] + e1.maps[1:])


def pullback_ext(phi: GradedMorphism, e: ExtensionComplex) -> ExtensionComplex:
    """e . phi for phi: M' -> M: G_c is replaced by G_c x_M M'."""
    if not same_module(phi.target, e.M):
        raise CategoryError("phi must end at the head of the extension")
    phi = _rebind(phi, target=e.M)
    head, prev = e.maps[-1], e.maps[-2]
    _, pG, pM = pullback(head, phi)
    inc = vstack(pG, pM)
    # (prev, 0) lands in the pullback since head o prev = 0
    into_sum = GradedMorphism(prev.source, inc.target, prev.images)
    return ExtensionComplex(e.maps[:-2] + [lift(into_sum, inc), pM])


def pushout_ext(e: ExtensionComplex, psi: GradedMorphism) -> ExtensionComplex:
    """psi . e for psi: N -> L: G_1 is replaced by G_1 +_N L."""
    if not same_module(psi.source, e.N):
        raise CategoryError("psi must start at the tail of the extension")
    psi = _rebind(psi, source=e.N)
    tail, nxt = e.maps[0], e.maps[1]
    P, _, iL = pushout(tail, psi)
    # the pushout is a quotient of G_1 + L; (nxt, 0) kills the identified pairs
    new_next = GradedMorphism(P, nxt.target, list(nxt.images) + [{} for _ in range(psi.target.rank)])
    return ExtensionComplex([iL, new_next] + e.maps[2:])


def direct_sum_ext(e1: ExtensionComplex, e2: ExtensionComplex) -> ExtensionComplex:
    if e1.c != e2.c:
        raise CategoryError("direct sum of extensions needs equal lengths")
    sums = [direct_sum(a, b)[0] for a, b in zip(e1.objects, e2.objects)]
    maps = []
    for i, (f, g) in enumerate(zip(e1.maps, e2.maps)):
        r = f.target.rank
        maps.append(GradedMorphism(sums[i], sums[i + 1], list(f.images) + [vec_shift(v, r) for v in g.images]))
    return ExtensionComplex(maps)


def _diagonal(M: Presentation, target: Presentation) -> GradedMorphism:
    one = (0,) * M.ring.nvars
    fo = M.field.one
    return GradedMorphism(M, target, [{(i, one): fo, (M.rank + i, one): fo} for i in range(M.rank)])


def _codiagonal(source: Presentation, N: Presentation) -> GradedMorphism:
    one = (0,) * N.ring.nvars
    return GradedMorphism(source, N, [{(i % N.rank, one): N.field.one} for i in range(2 * N.rank)])


def baer_sum(e1: ExtensionComplex, e2: ExtensionComplex) -> ExtensionComplex:
    """Baer sum: nabla . (e1 + e2) . Delta."""
    if e1.c != e2.c:
        raise CategoryError("Baer sum needs equal lengths")
    if not (same_module(e1.M, e2.M) and same_module(e1.N, e2.N)):
        raise CategoryError("endpoint mismatch")
    s = direct_sum_ext(e1, e2)
    return pushout_ext(pullback_ext(_diagonal(e1.M, s.M), s), _codiagonal(s.N, e1.N))


# ------------------------------------------------------------------ cocycle classes


@dataclass
class CocycleClass:
    """Coordinates of a class in a fixed basis of Ext^c(M, N)_0."""

    c: int
    coords: tuple
    M: Presentation = field(repr=False, compare=False)
    N: Presentation = field(repr=False, compare=False)
    slot: Optional[int] = None

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "CocycleClass") -> "CocycleClass":
        f = self.M.field
        return CocycleClass(self.c, tuple(f(a + b) for a, b in zip(self.coords, other.coords)), self.M, self.N, self.slot)


def _as_tuple(x, field) -> tuple:
    return tuple(field(v) for v in x)


def cocycle_map(e: ExtensionComplex, R: FreeResolution) -> GradedMorphism:
    """Comparison map from a resolution of M into e; its last component F_c -> N is a cocycle."""
    if not same_module(R.module, e.M):
        raise CategoryError("the resolution does not resolve the head of the extension")
    c = e.c
    alpha = lift(GradedMorphism(R.free(0), e.M, R.augmentation.images), e.maps[c])
    for i in range(1, c + 1):
        alpha = lift(alpha.compose(R.d(i)), e.maps[c - i])
    return alpha


def cocycle_class(e: ExtensionComplex, ext: Optional[ExtGroup] = None) -> CocycleClass:
    """Coordinates of e in Ext^c_A(M, N)_0 with respect to the basis of ``ext``."""
    if not e.is_exact():
        raise CategoryError("the class of a non-exact complex is undefined")
    if ext is None:
        ext = ExtGroup(e.c, free_resolution(e.M, e.c + 1), e.N)
    if ext.c != e.c:
        raise CategoryError("Ext group of the wrong degree")
    z = _rebind(cocycle_map(e, ext.resolution), target=ext.N)
    return CocycleClass(e.c, _as_tuple(ext.coordinates(z), e.M.field), e.M, e.N)


def extension_from_cocycle(z: GradedMorphism, R: FreeResolution, c: int) -> ExtensionComplex:
    """The c-extension represented by the cocycle z: F_c -> N.

    K = F_c / img d_(c+1) embeds in F_(c-1) through d_c; the truncated
    resolution 0 <- M <- F_0 <- ... <- F_(c-1) <- K <- 0 is pushed out
    along the map K -> N induced by z.
    """
    if c < 1:
        raise CategoryError("c must be >= 1")
    Fc = R.free(c)
    rels = list(R.d(c + 1).images) if R.free(c + 1).rank else []
    K = Fc.like(Fc.free, rels)
    maps = [GradedMorphism(K, R.free(c - 1), R.d(c).images)]
    maps += [R.d(i) for i in range(c - 1, 0, -1)]
    maps.append(R.augmentation)
    return pushout_ext(ExtensionComplex(maps), GradedMorphism(K, z.target, z.images))


# ------------------------------------------------------------------ into the quotient category


def _restriction_degree(res: QuotientExtResult, iota: GradedMorphism) -> int:
    Q, _ = quotient(iota.target, list(iota.images))
    if not is_in_C(Q):
        raise CategoryError("the cokernel of the inclusion is not of finite length")
    top = top_degree(Q)
    return max(res.stabilized_at, 0 if top is None else top + 1)


def _restrict(e: ExtensionComplex, iota: GradedMorphism, res: QuotientExtResult, D: int) -> ExtensionComplex:
    """e restricted along M_{>=D} -> M', which exists once D is past the cokernel of iota."""
    j = lift(res.slot(D).inclusion, _rebind(iota, source=e.M))
    return pullback_ext(j, e)


def _transport(res: QuotientExtResult, D: int, coords) -> tuple:
    """Slot-D coordinates to slot-d* coordinates through the connecting isomorphism."""
    dstar = res.stabilized_at
    field = res.M.field
    if D == dstar:
        return _as_tuple(coords, field)
    A = connecting_matrix(res.slot(dstar), res.slot(D))
    if A.shape[0] != A.shape[1] or linalg.rank(A, field) != A.shape[0]:
        raise CategoryError(f"connecting map from degree {dstar} to {D} is not an isomorphism")
    if A.shape[0] == 0:
        return ()
    x = linalg.solve(A, np.asarray(coords), field)
    return _as_tuple(x, field)


def _to_saturation(e: ExtensionComplex, res: QuotientExtResult) -> ExtensionComplex:
    if same_module(e.N, res.N_sat):
        return e
    eta = res.saturation.eta
    if not same_module(eta.source, e.N):
        raise CategoryError("the saturation data does not belong to the tail of the extension")
    return pushout_ext(e, eta)


def qext_image(e: ExtensionComplex, iota: GradedMorphism, ctx: Optional[SerreContext] = None,
               res: Optional[QuotientExtResult] = None) -> CocycleClass:
    """The class of e in the stabilized colimit of Ext^c_A(M_{>=d}, sat N).

    e is an exact extension of M' by N and iota: M' -> M a mono whose
    cokernel has finite length.  e is pushed into sat N, restricted to
    M_{>=D} inside M', and carried back to the slot d* where the colimit
    was certified.
    """
    if not same_module(iota.source, e.M):
        raise CategoryError("the inclusion must start at the head of the extension")
    if not is_mono(iota):
        raise CategoryError("the map into M must be a monomorphism")
    if res is None:
        res = ext_quotient(e.c, iota.target, e.N, ctx)
    if res.c != e.c:
        raise CategoryError("colimit data of the wrong degree")
    e = _to_saturation(e, res)
    D = _restriction_degree(res, iota)
    cls = cocycle_class(_restrict(e, iota, res, D), res.slot(D).ext)
    return CocycleClass(e.c, _transport(res, D, cls.coords), iota.target, res.N_sat, res.stabilized_at)


def colimit_class_equal(e1: ExtensionComplex, iota1: GradedMorphism, e2: ExtensionComplex, iota2: GradedMorphism,
                        ctx: Optional[SerreContext] = None, res: Optional[QuotientExtResult] = None) -> bool:
    """Equality in the colimit, checked directly at a common truncation degree
    without the transport back to d*."""
    if res is None:
        res = ext_quotient(e1.c, iota1.target, e1.N, ctx)
    e1, e2 = _to_saturation(e1, res), _to_saturation(e2, res)
    D = max(_restriction_degree(res, iota1), _restriction_degree(res, iota2))
    ext = res.slot(D).ext
    c1 = cocycle_class(_restrict(e1, iota1, res, D), ext)
    c2 = cocycle_class(_restrict(e2, iota2, res, D), ext)
    return c1.coords == c2.coords


def qext_preimage_ext1(e_hat: ExtensionComplex) -> Tuple[ExtensionComplex, GradedMorphism]:
    """Preimage of a 1-extension exact in the quotient.

    For 0 <- M <- E <- N <- 0 exact at N and E whose cokernel at M has
    finite length, return the exact 0 <- M' <- E <- N <- 0 with
    M' = img(E -> M), together with the inclusion M' -> M.
    """
    if e_hat.c != 1:
        raise CategoryError("the Ext^1 preimage needs a 1-extension")
    flags = e_hat.exact_flags
    if not (flags[0] and flags[1]):
        raise CategoryError("input is not left exact")
    pi = e_hat.maps[1]
    Q, _ = quotient(e_hat.M, list(pi.images))
    if not is_in_C(Q):
        raise CategoryError("input is not exact in the quotient category")
    _, inc = image(pi)
    return ExtensionComplex([e_hat.maps[0], lift(pi, inc)]), inc


# ------------------------------------------------------------------ exact torsion-free replacements


@dataclass
class Subcomplex:
    """An extension with the inclusions of its objects into the objects of a larger complex."""

    ext: ExtensionComplex
    inclusions: List[GradedMorphism]

    def quotients(self) -> List[Presentation]:
        return [quotient(f.target, list(f.images))[0] for f in self.inclusions]

    def quotients_in_C(self) -> bool:
        return all(is_in_C(Q) for Q in self.quotients())

    def inclusions_commute(self, big: ExtensionComplex) -> bool:
        return all(
            big.maps[i].compose(self.inclusions[i]).equals(
                _rebind(self.inclusions[i + 1].compose(self.ext.maps[i]), target=big.maps[i].target))
            for i in range(len(self.ext.maps))
        )

    def inclusions_mono(self) -> bool:
        return all(is_mono(f) for f in self.inclusions)


def _torsion_free(P: Presentation) -> bool:
    return torsion_HC(P)[0].is_zero()


def _check_torsion_free(e: ExtensionComplex, positions) -> None:
    for i in positions:
        if not _torsion_free(e.objects[i]):
            raise CategoryError(f"object at position {i} is not torsion-free")


def exact_subcomplex(e: ExtensionComplex, ctx: Optional[SerreContext] = None, check: bool = True) -> Subcomplex:
    """Exact subcomplex with the same N, torsion-free objects and finite-length quotients.

    Needs torsion-free objects and finite-length homology.  G_i' is the
    preimage in G_i of an almost complement of G_i / img(G_(i-1)'), and M'
    is the image of G_c'.
    """
    c = e.c
    if check:
        _check_torsion_free(e, range(c + 2))
        for i, H in enumerate(e.homology_modules()):
            if not is_in_C(H):
                raise CategoryError(f"homology at position {i} is not of finite length")
    incs = [identity(e.N)]
    prev = list(e.maps[0].images)
    for i in range(1, c + 1):
        G = e.objects[i]
        Gbar, _ = quotient(G, prev)
        _, ainc = almost_complement(Gbar, ctx)
        _, inc = subquotient(G, list(ainc.images) + [v for v in prev if v])
        incs.append(inc)
        prev = [e.maps[i].apply(v) for v in inc.images]
    _, minc = subquotient(e.M, prev, degrees=list(incs[-1].source.twists))
    incs.append(minc)
    maps = [lift(e.maps[i].compose(incs[i]), incs[i + 1]) for i in range(c + 1)]
    return Subcomplex(ExtensionComplex(maps), incs)


def ses_replace(e: ExtensionComplex, ctx: Optional[SerreContext] = None, check: bool = True) -> Subcomplex:
    """0 <- M' <- G' <- L' <- 0 inside an exact 0 <- M <- G <- L <- 0 with M torsion-free.

    G' is the almost complement of G, L' = L n G' and M' the image of G'.
    When G has finite length so does M, hence M = 0 and the zero
    subcomplex is returned.
    """
    if e.c != 1:
        raise CategoryError("ses_replace needs a short exact sequence")
    if check:
        if not e.is_exact():
            raise CategoryError("input is not exact")
        _check_torsion_free(e, [2])
    G = e.objects[1]
    Gp, ginc = almost_complement(G, ctx)
    _, linc = intersect(e.maps[0], ginc)
    _, minc = subquotient(e.M, [e.maps[1].apply(v) for v in ginc.images], degrees=list(Gp.twists))
    to_G = lift(linc, ginc)
    to_M = lift(e.maps[1].compose(ginc), minc)
    return Subcomplex(ExtensionComplex([to_G, to_M]), [lift(linc, e.maps[0]), ginc, minc])


def _restrict_head(inc_L: GradedMorphism, e: ExtensionComplex) -> Subcomplex:
    """The pullback of e along L' -> L as a subcomplex of e: the last middle
    object becomes the preimage of L'."""
    _, pG, pL = pullback(e.maps[-1], inc_L)
    new_prev = lift(e.maps[-2], pG)
    incs = [identity(o) for o in e.objects[:-2]] + [pG, inc_L]
    return Subcomplex(ExtensionComplex(e.maps[:-2] + [new_prev, pL]), incs)


def exact_almost_complement(e: ExtensionComplex, ctx: Optional[SerreContext] = None, check: bool = True) -> Subcomplex:
    """Exact subcomplex with torsion-free objects and finite-length quotients
    of an exact e whose ends are torsion-free, built by recursion on c."""
    if check:
        if not e.is_exact():
            raise CategoryError("input is not exact")
        _check_torsion_free(e, [0, e.c + 1])
    c = e.c
    if c == 1:
        # the middle of an extension of torsion-free modules is torsion-free
        return Subcomplex(e, [identity(o) for o in e.objects])
    # split at L = img(G_(c-1) -> G_c)
    _, Linc = image(e.maps[c - 1])
    head = ExtensionComplex([Linc, e.maps[c]])
    tail = ExtensionComplex(e.maps[:c - 1] + [lift(e.maps[c - 1], Linc)])
    s1 = ses_replace(head, ctx, check=False)
    s2 = _restrict_head(s1.inclusions[0], tail)
    rec = exact_almost_complement(s2.ext, ctx, check=False)
    # 0 <- M' <- G_c' <- L~ <- 0 has finite-length homology at G_c'
    into = s1.ext.maps[0].compose(rec.inclusions[-1])
    s3 = exact_subcomplex(ExtensionComplex([into, s1.ext.maps[1]]), ctx, check=False)
    joint = s3.ext.maps[0].compose(rec.ext.maps[-1])
    out = ExtensionComplex(rec.ext.maps[:-1] + [joint, s3.ext.maps[1]])
    incs = [s2.inclusions[i].compose(rec.inclusions[i]) for i in range(c)]
    incs.append(s1.inclusions[1].compose(s3.inclusions[1]))
    incs.append(s1.inclusions[2].compose(s3.inclusions[2]))
    return Subcomplex(out, incs)


def baer_sum1(e1: ExtensionComplex, e2: ExtensionComplex) -> ExtensionComplex:
    """Baer sum of two 1-extensions."""
    if e1.c != 1 or e2.c != 1:
        raise CategoryError("baer_sum1 takes 1-extensions")
    return baer_sum(e1, e2)
