"""The quotient of graded modules by finite-length modules (sheaves on P^n).

Saturation is computed by stripping torsion and then iterating
X -> Hom(m, X)_{>=0} until the natural map is onto.  Hom in the quotient is
Hom_A(M, sat N); Ext in the quotient is the colimit of Ext^c_A(M_{>=d}, sat N)
over truncations, evaluated with an explicit stabilization policy.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from . import linalg
from .abcat import (
    CategoryError,
    GradedMorphism,
    Presentation,
    cyclic_module,
    free_module,
    hom_group_basis,
    hom_module,
    identity,
    is_epi,
    is_in_C,
    lift,
    minimal_presentation,
    quotient,
    top_degree,
    torsion_HC,
    truncate,
    zero_map,
    zero_module,
)
from .homres import ExtGroup, chain_lift, ext_module, free_resolution, regularity
from .ring import PolyRing

DEFAULT_MAX_DEGREE = 30
DEFAULT_WINDOW = 3


class NotStabilized(CategoryError):
    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = list(trace)


def _env_max_degree() -> int:
    raw = os.environ.get("SQEXT_MAX_DEGREE")
    if raw is None or raw == "":
        return DEFAULT_MAX_DEGREE
    try:
        return int(raw)
    except ValueError:
        raise CategoryError(f"SQEXT_MAX_DEGREE must be an integer, got {raw!r}") from None


@dataclass
class SerreContext:
    """Colimit policy: start at the proven start degree, accept after
    ``window`` equal values (or verified isomorphisms in strict mode), never
    go beyond ``max_degree``."""

    window: int = DEFAULT_WINDOW
    max_degree: Optional[int] = None
    strict: bool = False
    max_saturation_steps: int = 64

    def __post_init__(self):
        if self.max_degree is None:
            self.max_degree = _env_max_degree()
        if self.window < 1:
            raise CategoryError("window must be >= 1")
        if self.max_degree < 0:
            raise CategoryError("max degree must be >= 0")

    in_C = staticmethod(is_in_C)


# ------------------------------------------------------------------ saturation


def irrelevant_ideal(ring: PolyRing, ring_relations=()) -> Presentation:
    """m = (x_0, ..., x_n) as a module (generated in degree 1)."""
    from .abcat import subquotient

    S = free_module(ring, [0], ring_relations)
    gens = [{(0, ring.var(k)): ring.field.one} for k in range(ring.nvars)]
    m, _ = subquotient(S, gens, minimal=False)
    return m


@dataclass
class SaturationResult:
    module: Presentation
    eta: GradedMorphism
    torsion: Presentation
    torsion_inclusion: GradedMorphism
    steps: int


def _natural_map_to_hom_m(X: Presentation, mpres: Presentation):
    """(Hom(m, X), X -> Hom(m, X)) with x -> (x_k -> x_k x).

    Generator k of ``mpres`` is the variable x_k.
    """
    K, inc = hom_module(mpres, X)
    nX = X.rank
    ring = X.ring
    images = []
    for i in range(nX):
        images.append({(k * nX + i, ring.var(k)): X.field.one for k in range(ring.nvars)})
    nat0 = GradedMorphism(X, inc.target, images)
    return K, lift(nat0, inc)


def saturate(M: Presentation, ctx: Optional[SerreContext] = None) -> SaturationResult:
    """The saturation sat(M) = sum_{i>=0} Gamma(M~(i)) with the unit eta: M -> sat(M)."""
    ctx = ctx or SerreContext()
    T, tinc = torsion_HC(M)
    X, proj = quotient(M, list(tinc.images))
    eta = proj
    if is_in_C(X):
        Z = zero_module(M.ring, M.ring_relations)
        return SaturationResult(Z, zero_map(M, Z), T, tinc, 0)
    mpres = irrelevant_ideal(M.ring, M.ring_relations)
    steps = 0
    while True:
        K, nat = _natural_map_to_hom_m(X, mpres)
        K0, inc0 = truncate(K, 0)
        nat0 = lift(nat, inc0)
        if is_epi(nat0):
            break
        steps += 1
        if steps > ctx.max_saturation_steps:
            raise CategoryError("saturation did not terminate within the step cap")
        X = K0
        eta = nat0.compose(eta)
    P, phi, _ = minimal_presentation(X)
    return SaturationResult(P, phi.compose(eta), T, tinc, steps)


def is_saturated(M: Presentation) -> bool:
    """Hom_A(k, M) = 0 and Ext^1_A(k, M) vanishes in degrees >= 0."""
    ring = M.ring
    k = cyclic_module(ring, [ring.gens()[i] for i in range(ring.nvars)], ring_relations=M.ring_relations)
    R = free_resolution(k, 2)
    if not ext_module(0, k, M, R).is_zero():
        return False
    E1 = ext_module(1, k, M, R)
    if E1.is_zero():
        return True
    top = top_degree(E1)
    return top is None or top < 0


def almost_complement(M: Presentation, ctx: Optional[SerreContext] = None):
    """(M_{>=d}, inclusion) with d one above the top degree of H_C(M); M itself if torsion-free."""
    T, _ = torsion_HC(M)
    if T.is_zero():
        return M, identity(M)
    if is_in_C(M):
        Z = zero_module(M.ring, M.ring_relations)
        return Z, zero_map(Z, M)
    d = top_degree(T) + 1
    return truncate(M, max(d, 0))


# ------------------------------------------------------------------ twists


def twist_rep(ring: PolyRing, d: int) -> Presentation:
    """A module in the category representing O(d): S(d) for d <= 0, S(d)_{>=0} for d > 0."""
    if d <= 0:
        return free_module(ring, [-d])
    P, _ = truncate(free_module(ring, [-d]), 0)
    return P


# ------------------------------------------------------------------ Hom in the quotient


def hom_quotient(M: Presentation, N: Presentation, ctx: Optional[SerreContext] = None, saturation=None):
    """(dim, basis) of Hom_A(M, sat N), the Hom of the quotient category."""
    sat = saturation or saturate(N, ctx)
    basis = hom_group_basis(M, sat.module)
    return len(basis), basis


def _reg0(P: Presentation) -> int:
    r = regularity(P) if P.rank else None
    return 0 if r is None else r


def hom_quotient_colimit(M: Presentation, N: Presentation, ctx: Optional[SerreContext] = None) -> int:
    """dim colim_d Hom_A(M_{>=d}, N / H_C(N)), evaluated along truncations."""
    ctx = ctx or SerreContext()
    T, tinc = torsion_HC(N)
    Np, _ = quotient(N, list(tinc.images))
    d0 = max(0, _reg0(M), _reg0(Np))
    trace = []
    for d in range(d0, ctx.max_degree + 1):
        Md, _ = truncate(M, d)
        dim = len(hom_group_basis(Md, Np))
        trace.append((d, dim))
        if len(trace) >= ctx.window and len({v for _, v in trace[-ctx.window:]}) == 1:
            return dim
    raise NotStabilized("Hom colimit not stabilized by the degree cap", trace)


# ------------------------------------------------------------------ Ext in the quotient


class ColimitSlot:
    """The data at truncation degree d: M_{>=d}, its inclusion, a resolution
    and the Ext group Ext^c_A(M_{>=d}, N)_0."""

    def __init__(self, M: Presentation, d: int, c: int, N: Presentation):
        self.d = d
        self.module, self.inclusion = truncate(M, d)
        self.resolution = free_resolution(self.module, c + 1)
        self.ext = ExtGroup(c, self.resolution, N)

    @property
    def dim(self) -> int:
        return self.ext.dim


def connecting_matrix(lower: ColimitSlot, upper: ColimitSlot) -> np.ndarray:
    """Matrix of Ext^c(M_{>=d}, N) -> Ext^c(M_{>=d'}, N) (d < d') in rep coordinates."""
    c = lower.ext.c
    iota = lift(upper.inclusion, lower.inclusion)
    g = chain_lift(iota, upper.resolution, lower.resolution, upto=c)[c]
    field = lower.ext.field
    A = linalg.zeros(upper.dim, lower.dim, field)
    for k, z in enumerate(lower.ext.rep_morphisms()):
        A[:, k] = upper.ext.coordinates(z.compose(g))
    return A


@dataclass
class QuotientExtResult:
    c: int
    dim: int
    stabilized_at: int
    witnesses: list
    strict_verified: bool
    trace: list
    start_degree: int
    window: int
    saturation: SaturationResult
    M: Presentation
    slots: Dict[int, ColimitSlot] = field(default_factory=dict, repr=False)
    ctx: Optional[SerreContext] = field(default=None, repr=False)

    @property
    def N_sat(self) -> Presentation:
        return self.saturation.module

    def slot(self, d: int) -> ColimitSlot:
        if d not in self.slots:
            self.slots[d] = ColimitSlot(self.M, d, self.c, self.N_sat)
        return self.slots[d]

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "dim": self.dim,
            "stabilized_at": self.stabilized_at,
            "strict_verified": self.strict_verified,
        }


def ext_start_degree(c: int, M: Presentation, Nsat: Presentation) -> int:
    """First truncation degree from which the connecting maps are isomorphisms.

    Ext^c(M_{>=d}) -> Ext^c(M_{>=d+1}) is an isomorphism as soon as
    Ext^c(k, N)_d = Ext^{c+1}(k, N)_d = 0, which holds for d > reg N - c
    (Koszul self-duality); for c = 0 and N torsion-free, d >= reg N suffices.
    Torsion of M is truncated away as well.
    """
    rN = _reg0(Nsat)
    bound = rN if c == 0 else rN - c + 1
    d0 = max(0, _reg0(M), bound)
    T, _ = torsion_HC(M)
    if not T.is_zero():
        d0 = max(d0, top_degree(T) + 1)
    return d0


def ext_quotient(c: int, M: Presentation, N: Presentation, ctx: Optional[SerreContext] = None,
                 saturation: Optional[SaturationResult] = None) -> QuotientExtResult:
    """Ext^c in the quotient category as the stabilized colimit of Ext^c_A(M_{>=d}, sat N)."""
    if c < 0:
        raise CategoryError("c must be >= 0")
    ctx = ctx or SerreContext()
    sat = saturation or saturate(N, ctx)
    Nsat = sat.module
    d0 = ext_start_degree(c, M, Nsat)
    slots: Dict[int, ColimitSlot] = {}
    trace = []
    w = ctx.window
    isos: Dict[int, bool] = {}
    d = d0
    while d <= ctx.max_degree:
        slots[d] = ColimitSlot(M, d, c, Nsat)
        trace.append((d, slots[d].dim))
        if ctx.strict and d - 1 in slots:
            A = connecting_matrix(slots[d - 1], slots[d])
            isos[d - 1] = A.shape[0] == A.shape[1] and linalg.rank(A, Nsat.field) == A.shape[0]
        span = max(w, 2) if ctx.strict else w
        start = d - span + 1
        if start >= d0 and len({slots[e].dim for e in range(start, d + 1)}) == 1:
            if not ctx.strict:
                return _result(c, M, sat, slots, trace, start, d0, w, False, ctx)
            if all(isos[e] for e in range(start, d)):
                return _result(c, M, sat, slots, trace, start, d0, w, True, ctx)
        d += 1
    raise NotStabilized(f"Ext^{c} colimit not stabilized by degree {ctx.max_degree}", trace)


def _result(c, M, sat, slots, trace, dstar, d0, w, strict_ok, ctx):
    s = slots[dstar]
    return QuotientExtResult(
        c=c,
        dim=s.dim,
        stabilized_at=dstar,
        witnesses=s.ext.rep_morphisms(),
        strict_verified=strict_ok,
        trace=trace,
        start_degree=d0,
        window=w,
        saturation=sat,
        M=M,
        slots=slots,
        ctx=ctx,
    )


def sheaf_cohomology_table(d_range: Sequence[int], c_range: Sequence[int], n: int,
                           ctx: Optional[SerreContext] = None, field=None) -> Dict[int, Dict[int, int]]:
    """H^c(P^n, O(d)) computed as Ext^c of the quotient category from S to O(d)."""
    ctx = ctx or SerreContext()
    ring = PolyRing(n + 1, field)
    S = free_module(ring, [0])
    table: Dict[int, Dict[int, int]] = {}
    for d in d_range:
        N = twist_rep(ring, d)
        sat = saturate(N, ctx)
        table[d] = {c: ext_quotient(c, S, N, ctx, saturation=sat).dim for c in c_range}
    return table
