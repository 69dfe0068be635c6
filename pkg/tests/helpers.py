"""Random instance builders shared by the test modules."""

import random

from sqext.abcat import from_matrix
from sqext.homres import ExtGroup, free_resolution
from sqext.ring import PolyRing, monomials_of_degree
from sqext import yoneda as Y


def ring(nvars, p=32003):
    return PolyRing(nvars, {"type": "fp", "p": p})


def random_monomial_module(rng: random.Random, R, max_gens=2, max_twist=3, max_rels=3, max_rel_deg=3):
    """A module with monomial relations x^m e_i and generator degrees <= max_twist."""
    r = rng.randint(1, max_gens)
    twists = [rng.randint(0, max_twist) for _ in range(r)]
    rows = []
    for _ in range(rng.randint(0, max_rels)):
        i = rng.randrange(r)
        m = rng.choice(monomials_of_degree(R.nvars, rng.randint(1, max_rel_deg)))
        row = [{} for _ in range(r)]
        row[i] = {m: 1}
        rows.append(row)
    return from_matrix(R, twists, rows)


def random_vector(rng: random.Random, R, twists, D, terms=3):
    """A random homogeneous vector of degree D (possibly zero)."""
    v = {}
    p = R.field.p
    cands = [(i, m) for i, a in enumerate(twists) if D >= a for m in monomials_of_degree(R.nvars, D - a)]
    for _ in range(terms):
        if not cands:
            break
        t = rng.choice(cands)
        v[t] = (v.get(t, 0) + rng.randrange(1, p)) % p
    return {t: c for t, c in v.items() if c}


def extension_with_coords(M, N, coords, R=None, c=1):
    """An A-extension of M by N whose class has the given coordinates."""
    R = R or free_resolution(M, c + 1)
    ext = ExtGroup(c, R, N)
    z = ext.cocycle_from_coordinates(coords)
    return Y.extension_from_cocycle(z, R, c), ext


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE_RESULTS = {}
