"""Complexes, free resolutions, regularity, chain lifts and Ext."""

from __future__ import annotations

from collections import Counter
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import linalg
from .abcat import (
    CategoryError,
    GradedMorphism,
    HomSpace,
    Presentation,
    cokernel,
    free_module,
    hom_free_map,
    hom_free_module,
    identity,
    kernel,
    lift,
    minimal_presentation,
    zero_map,
)
from .groebner import SubmoduleBasis, ring_relation_columns, schreyer_syzygies
from .ring import FreeModule, Vector


class Complex:
    """A chain complex C_0 <- C_1 <- ... with d_i: C_i -> C_{i-1} (d_0 omitted)."""

    def __init__(self, objects: Sequence[Presentation], differentials: Sequence[GradedMorphism]):
        if len(differentials) != max(len(objects) - 1, 0):
            raise CategoryError("need one differential between consecutive objects")
        self.objects = list(objects)
        self.differentials = list(differentials)  # differentials[i-1] = d_i

    def d(self, i: int) -> GradedMorphism:
        return self.differentials[i - 1]

    def is_complex(self) -> bool:
        return all(
            self.d(i - 1).compose(self.d(i)).is_zero() for i in range(2, len(self.objects))
        )

    def homology_dim(self, i: int, t: int) -> int:
        """dim_k H_i in degree t (end terms use zero maps)."""
        C = self.objects
        n = C[i].hilbert(t)
        rk_out = linalg.rank(self.d(i).slice_matrix(t), C[i].field) if i >= 1 else 0
        rk_in = linalg.rank(self.d(i + 1).slice_matrix(t), C[i].field) if i + 1 < len(C) else 0
        return n - rk_out - rk_in


class FreeResolution:
    """F_0 <- F_1 <- ... <- F_L with an augmentation F_0 -> M.

    In quotient-ring mode every F_i is free over R, presented as S^b / (f).
    ``complete`` records that the kernel of the last differential is zero.
    """

    def __init__(self, module: Presentation, frees: List[Presentation], differentials: List[GradedMorphism],
                 augmentation: GradedMorphism, minimal: bool, complete: bool):
        self.module = module
        self.frees = frees
        self.differentials = differentials
        self.augmentation = augmentation
        self.minimal = minimal
        self.complete = complete

    @property
    def length(self) -> int:
        return len(self.frees) - 1

    def free(self, i: int) -> Presentation:
        """F_i, the zero module beyond the computed range."""
        if 0 <= i < len(self.frees):
            return self.frees[i]
        if i >= len(self.frees) and not self.complete:
            raise CategoryError(f"resolution computed only to length {self.length}")
        return free_module(self.module.ring, [], self.module.ring_relations)

    def d(self, i: int) -> GradedMorphism:
        """d_i: F_i -> F_{i-1} (zero maps outside the computed range)."""
        if 1 <= i <= self.length:
            return self.differentials[i - 1]
        return zero_map(self.free(i), self.free(i - 1))

    def betti(self) -> Dict[tuple, int]:
        table = Counter()
        for i, F in enumerate(self.frees):
            for a in F.twists:
                table[(i, a)] += 1
        return dict(table)

    def betti_numbers(self) -> List[int]:
        return [F.rank for F in self.frees]

    def as_complex(self) -> Complex:
        return Complex(self.frees, self.differentials)

    def d_squared_zero(self) -> bool:
        if self.length >= 1 and not self.augmentation.compose(self.d(1)).is_zero():
            return False
        return all(self.d(i - 1).compose(self.d(i)).is_zero() for i in range(2, self.length + 1))

    def has_unit_entries(self) -> bool:
        for f in self.differentials:
            for j, v in enumerate(f.images):
                for (i, m), c in v.items():
                    if not any(m):
                        return True
        return False


def _kernel_generators(F: FreeModule, images: Sequence[Vector], target: Presentation, minimal: bool):
    """Generators of {a in F : sum a_j images_j = 0 in target}, modulo the ring
    relations of F.  Returns (vectors, degrees)."""
    ring_rel = target.ring_relations
    trel = list(target.all_relations)
    b = F.rank
    B = SubmoduleBasis(target.free, list(images) + trel, track=True, degrees=list(F.twists) + [None] * len(trel))
    pre = []
    for v in schreyer_syzygies(B):
        w = {t: c for t, c in v.items() if t[0] < b}
        if w:
            pre.append(w)
    ringcols = ring_relation_columns(F, ring_rel)
    if minimal:
        K = SubmoduleBasis(F, ringcols + pre, track=False, modulo=range(len(ringcols)))
        gens = [pre[i - len(ringcols)] for i in sorted(K.minimal)]
    else:
        if ringcols:
            K = SubmoduleBasis(F, ringcols, track=False)
            gens = [v for v in pre if not K.is_member(v)]
        else:
            gens = pre
    return gens, [F.vector_degree(g) for g in gens]


def free_resolution(M: Presentation, length: int, minimalize: bool = True) -> FreeResolution:
    """A graded free resolution of M up to homological degree ``length``.

    With ``minimalize`` each step keeps a minimal generating set of the
    kernel (selected during the Groebner pass), which gives the minimal
    resolution; without it the raw Schreyer syzygies are kept.
    """
    if length < 0:
        raise CategoryError("length must be >= 0")
    ring = M.ring
    rr = M.ring_relations
    if minimalize:
        Mmin, _, psi = minimal_presentation(M)
    else:
        Mmin, psi = M, identity(M)
    F0 = free_module(ring, Mmin.twists, rr)
    aug = psi.compose(GradedMorphism(F0, Mmin, [F0.free.basis_vector(i) for i in range(F0.rank)]))
    frees = [F0]
    diffs: List[GradedMorphism] = []
    # kernel of F_0 -> M: the relations of Mmin modulo ring relations
    ringcols = ring_relation_columns(F0.free, rr)
    rels = list(Mmin.relations)
    if minimalize and rels:
        K = SubmoduleBasis(F0.free, ringcols + rels, track=False, modulo=range(len(ringcols)))
        gens = [rels[i - len(ringcols)] for i in sorted(K.minimal)]
    else:
        gens = rels
    complete = False
    i = 0
    while True:
        if not gens:
            complete = True
            break
        if i >= length:
            break
        degs = [frees[-1].free.vector_degree(g) for g in gens]
        Fi = free_module(ring, degs, rr)
        di = GradedMorphism(Fi, frees[-1], gens)
        frees.append(Fi)
        diffs.append(di)
        i += 1
        gens, _ = _kernel_generators(Fi.free, gens, frees[-2], minimalize)
    return FreeResolution(M, frees, diffs, aug, minimalize, complete)


def regularity(M: Presentation) -> Optional[int]:
    """Castelnuovo-Mumford regularity from the minimal resolution; None for M = 0."""
    if M.ring_relations:
        raise CategoryError("regularity is only available over the polynomial ring")
    R = free_resolution(M, M.ring.nvars + 1)
    vals = [max(F.twists) - i for i, F in enumerate(R.frees) if F.rank]
    return max(vals) if vals else None


def euler_check(M: Presentation, R: FreeResolution, degrees) -> bool:
    """Alternating sum of Hilbert functions of the F_i against that of M.

    For a truncated resolution the kernel of the last differential is
    accounted for (its Hilbert function comes from slice ranks).
    """
    L = R.length
    for t in degrees:
        total = 0
        for i, F in enumerate(R.frees):
            total += (-1) ** i * F.hilbert(t)
        if not R.complete:
            last = R.frees[L]
            rk = linalg.rank(R.d(L).slice_matrix(t), M.field) if L >= 1 else linalg.rank(R.augmentation.slice_matrix(t), M.field)
            total += (-1) ** (L + 1) * (last.hilbert(t) - rk)
        if total != M.hilbert(t):
            return False
    return True


def chain_lift(f: GradedMorphism, RM: FreeResolution, RN: FreeResolution, upto: Optional[int] = None) -> List[GradedMorphism]:
    """Chain map g_i: F_i(M) -> F_i(N) over f: M -> N."""
    if upto is None:
        upto = RM.length
    g0 = lift(f.compose(RM.augmentation), RN.augmentation)
    out = [g0]
    for i in range(1, upto + 1):
        src = RM.free(i)
        if not src.rank:
            out.append(zero_map(src, RN.free(i)))
            continue
        rhs = out[-1].compose(RM.d(i))
        if RN.free(i).rank == 0:
            if not rhs.is_zero():
                raise CategoryError("chain lift failed: target resolution too short")
            out.append(zero_map(src, RN.free(i)))
            continue
        out.append(lift(rhs, RN.d(i)))
    return out


# ------------------------------------------------------------------ Hom complexes and Ext


def _hom_free_dims(F: Presentation, N: Presentation) -> List[int]:
    offs = [0]
    for a in F.twists:
        offs.append(offs[-1] + N.hilbert(a))
    return offs


def hom_differential(d: GradedMorphism, N: Presentation) -> np.ndarray:
    """Matrix of h -> h o d from Hom(F', N)_0 to Hom(F, N)_0, for d: F -> F' free."""
    F, Fp = d.source, d.target
    offs_src = _hom_free_dims(Fp, N)
    offs_tgt = _hom_free_dims(F, N)
    A = linalg.zeros(offs_tgt[-1], offs_src[-1], N.field)
    for j, v in enumerate(d.images):
        polys: Dict[int, dict] = {}
        for (l, m), c in v.items():
            polys.setdefault(l, {})[m] = c
        for l, p in polys.items():
            if offs_src[l + 1] > offs_src[l] and offs_tgt[j + 1] > offs_tgt[j]:
                A[offs_tgt[j]:offs_tgt[j + 1], offs_src[l]:offs_src[l + 1]] = N.mult_matrix(p, Fp.twists[l])
    return A


class ExtGroup:
    """The degree-0 part of Ext^c_A(M, N) computed from a resolution of M.

    Cocycles are degree-0 maps F_c -> N killed by composition with d_{c+1};
    coboundaries are h o d_c.  ``reps`` is a basis of a complement of the
    coboundaries inside the cocycles.
    """

    def __init__(self, c: int, R: FreeResolution, N: Presentation):
        if c < 0:
            raise CategoryError("c must be >= 0")
        if c + 1 > R.length and not R.complete:
            raise CategoryError("resolution too short for this Ext")
        self.c = c
        self.resolution = R
        self.N = N
        self.field = N.field
        Fc = R.free(c)
        self.Fc = Fc
        self.space = HomSpace(Fc, N)
        n = self.space.dim_ambient
        out = hom_differential(R.d(c + 1), N) if R.free(c + 1).rank else linalg.zeros(0, n, self.field)
        self.cocycles = linalg.nullspace(out, self.field)
        if c >= 1 and R.free(c - 1).rank and n:
            D = hom_differential(R.d(c), N)
            self.coboundaries = [D[:, k] for k in range(D.shape[1])]
        else:
            self.coboundaries = []
        nb = len(self.coboundaries)
        cols = self.coboundaries + self.cocycles
        if cols:
            A = np.stack(cols, axis=1)
            _, piv = linalg.rref(A, self.field)
            self.reps = [self.cocycles[k - nb] for k in piv if k >= nb]
        else:
            self.reps = []
        self.dim = len(self.reps)
        cols = self.coboundaries + self.reps
        self._solver = linalg.Solver(np.stack(cols, axis=1), self.field) if cols else None

    def coordinates(self, z) -> np.ndarray:
        """Coordinates of the class of the cocycle z (a vector or a morphism F_c -> N)."""
        if isinstance(z, GradedMorphism):
            z = self.space.from_morphism(z)
        if self.dim == 0:
            return linalg.zero_vector(0, self.field)
        x = self._solver.solve(np.asarray(z))
        if x is None:
            raise CategoryError("not a cocycle")
        return x[len(self.coboundaries):]

    def is_cocycle(self, z) -> bool:
        if isinstance(z, GradedMorphism):
            z = self.space.from_morphism(z)
        R = self.resolution
        if not R.free(self.c + 1).rank:
            return True
        out = linalg.matmul(hom_differential(R.d(self.c + 1), self.N), np.asarray(z).reshape(-1, 1), self.field)
        return not out.any()

    def rep_morphisms(self) -> List[GradedMorphism]:
        return [self.space.to_morphism(u) for u in self.reps]

    def cocycle_from_coordinates(self, x) -> GradedMorphism:
        u = linalg.zero_vector(self.space.dim_ambient, self.field)
        p = self.field.p
        for coef, r in zip(x, self.reps):
            u = u + coef * r
        if p:
            u %= p
        return self.space.to_morphism(u)


def ext_group_basis(c: int, M: Presentation, N: Presentation, resolution: Optional[FreeResolution] = None):
    """(dimension, cocycle representatives F_c -> N) for Ext^c_A(M, N)_0."""
    R = resolution or free_resolution(M, c + 1)
    E = ExtGroup(c, R, N)
    return E.dim, E.rep_morphisms()


def ext_module(c: int, M: Presentation, N: Presentation, resolution: Optional[FreeResolution] = None) -> Presentation:
    """Ext^c_A(M, N) as a graded module: H^c of Hom(F_., N)."""
    R = resolution or free_resolution(M, c + 1)
    H_c = hom_free_module(R.free(c), N)
    out = hom_free_map(R.d(c + 1), N) if R.free(c + 1).rank else None
    if out is not None:
        K, inc = kernel(out)
    else:
        K, inc = H_c, identity(H_c)
    if c >= 1 and R.free(c - 1).rank and K.rank:
        inc_map = hom_free_map(R.d(c), N)
        h = lift(inc_map, inc)
        Q, _ = cokernel(h)
        return Q
    return K
