import random

import pytest
from hypothesis import given, settings, strategies as st

from sqext.abcat import (
    cokernel,
    cyclic_module,
    free_module,
    hilbert_function,
    hom_group_basis,
    is_in_C,
    is_iso,
    is_mono,
    torsion_HC,
    truncate,
)
from sqext.serre import (
    NotStabilized,
    SerreContext,
    almost_complement,
    ext_quotient,
    hom_quotient,
    hom_quotient_colimit,
    is_saturated,
    saturate,
    sheaf_cohomology_table,
    twist_rep,
)

from helpers import random_monomial_module, ring
from oracles import cech_p1, h_closed, sat_hilbert_p1_monomial

S = ring(2)
S0 = free_module(S, [0])
k = cyclic_module(S, ["x0", "x1"])
fat = cyclic_module(S, ["x0^2", "x0*x1"])
point = cyclic_module(S, ["x0"])


def test_saturate_free_is_identity():
    sat = saturate(S0)
    assert sat.steps == 0 and is_iso(sat.eta)
    assert sat.module.twists == (0,) and not sat.module.relations


def test_saturate_fat_point():
    sat = saturate(fat)
    assert hilbert_function(sat.module, 0, 5) == hilbert_function(point, 0, 5)
    assert hilbert_function(sat.torsion, 0, 3) == [0, 1, 0, 0]
    # eta is the projection onto the torsion-free quotient
    K, _ = cokernel(sat.eta)
    assert K.is_zero()
    for t in range(0, 5):
        assert sat.module.hilbert(t) == sat_hilbert_p1_monomial([(2, 0), (1, 1)], t)


def test_saturate_k_is_zero():
    assert saturate(k).module.is_zero()


def test_saturate_truncation_recovers_S():
    m, _ = truncate(S0, 2)
    sat = saturate(m)
    assert sat.steps >= 1
    assert hilbert_function(sat.module, 0, 4) == [1, 2, 3, 4, 5]
    assert is_mono(sat.eta)


def test_is_saturated_examples():
    assert is_saturated(S0)
    assert not is_saturated(fat)
    m, _ = truncate(S0, 1)
    assert not is_saturated(m)
    assert hilbert_function(saturate(m).module, 0, 0) != hilbert_function(m, 0, 0)


def test_almost_complement_examples():
    P, inc = almost_complement(S0)
    assert is_iso(inc)
    P, inc = almost_complement(fat)
    assert min(P.twists) == 2
    Q, _ = cokernel(inc)
    assert hilbert_function(Q, 0, 4) == [1, 2, 0, 0, 0]
    P, inc = almost_complement(k)
    assert P.is_zero()
    assert is_in_C(cokernel(inc)[0])


def test_hom_quotient_examples():
    assert hom_quotient(S0, S0)[0] == 1
    assert hom_quotient(S0, truncate(S0, 2)[0])[0] == 1
    assert hom_quotient(fat, point)[0] == 1
    assert len(hom_group_basis(fat, point)) == 1


def test_hom_quotient_colimit_examples():
    assert hom_quotient_colimit(S0, S0) == 1
    assert hom_quotient_colimit(S0, twist_rep(S, -1)) == 0
    assert hom_quotient_colimit(fat, point) == 1


def test_ext_quotient_examples():
    assert ext_quotient(0, S0, S0).dim == 1
    r = ext_quotient(1, S0, twist_rep(S, -2))
    assert r.dim == 1 == cech_p1(-2)[1]
    P2 = ring(3)
    r = ext_quotient(2, free_module(P2, [0]), twist_rep(P2, -3))
    assert r.dim == 1 == h_closed(2, -3, 2)


def test_ext_quotient_strict_and_cap():
    r = ext_quotient(1, S0, twist_rep(S, -2), SerreContext(strict=True))
    assert r.strict_verified and r.dim == 1
    assert r.stabilized_at >= r.start_degree
    with pytest.raises(NotStabilized) as exc:
        ext_quotient(1, S0, twist_rep(S, -2), SerreContext(window=3, max_degree=r.start_degree + 1))
    assert exc.value.trace


@pytest.mark.parametrize("d", range(-4, 3))
def test_p1_cohomology_against_cech(d):
    h0, h1 = cech_p1(d)
    N = twist_rep(S, d)
    assert ext_quotient(0, S0, N).dim == h0
    assert ext_quotient(1, S0, N).dim == h1


def test_sheaf_table_examples():
    t = sheaf_cohomology_table([-2, 3], [0, 1], 1)
    assert t[-2] == {0: 0, 1: 1} and t[3] == {0: 4, 1: 0}
    t = sheaf_cohomology_table([0], [0, 1, 2], 2)
    assert t[0] == {0: 1, 1: 0, 2: 0}


# ------------------------------------------------------------------ properties

seeds = st.integers(0, 10**6)


def random_p1_ideal(rng):
    gens = []
    for _ in range(rng.randint(1, 3)):
        d = rng.randint(1, 3)
        a = rng.randint(0, d)
        gens.append((a, d - a))
    return gens


@given(seeds)
def test_saturation_matches_cech_oracle(seed):
    rng = random.Random(seed)
    gens = random_p1_ideal(rng)
    M = cyclic_module(S, [f"x0^{a}*x1^{b}" for a, b in gens])
    sat = saturate(M)
    for t in range(0, 6):
        assert sat.module.hilbert(t) == sat_hilbert_p1_monomial(gens, t)


@given(seeds)
def test_saturation_invariants(seed):
    rng = random.Random(seed)
    M = random_monomial_module(rng, S, max_twist=2)
    sat = saturate(M)
    T, _ = torsion_HC(M)
    assert hilbert_function(sat.torsion, 0, 6) == hilbert_function(T, 0, 6)
    assert is_in_C(cokernel(sat.eta)[0])
    assert is_saturated(sat.module)
    again = saturate(sat.module)
    assert is_iso(again.eta) or sat.module.is_zero()
    assert torsion_HC(sat.module)[0].is_zero()


@given(seeds)
def test_almost_complement_definition(seed):
    rng = random.Random(seed)
    M = random_monomial_module(rng, S)
    P, inc = almost_complement(M)
    assert torsion_HC(P)[0].is_zero()
    assert is_in_C(cokernel(inc)[0])


@given(seeds)
def test_hom_routes_agree(seed):
    rng = random.Random(seed)
    M = random_monomial_module(rng, S, max_twist=2)
    N = random_monomial_module(rng, S, max_twist=2)
    dim, _ = hom_quotient(M, N)
    assert hom_quotient_colimit(M, N) == dim
    assert ext_quotient(0, M, N).dim == dim


@settings(max_examples=10)
@given(seeds)
def test_strict_window_monotone(seed):
    rng = random.Random(seed)
    M = random_monomial_module(rng, S, max_twist=2)
    d = rng.randint(-3, 2)
    c = rng.randint(0, 1)
    r = ext_quotient(c, M, twist_rep(S, d), SerreContext(strict=True))
    assert r.strict_verified
    assert r.slot(r.stabilized_at + 3).dim == r.dim
