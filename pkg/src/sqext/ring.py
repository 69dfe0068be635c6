"""Exact coefficient fields, graded polynomial rings and twisted free modules.

Polynomials are stored as dicts ``{exponent_tuple: coefficient}`` and module
elements ("vectors") as dicts ``{(position, exponent_tuple): coefficient}``.
Coefficients are plain ``int`` in ``[0, p)`` over a prime field and
``fractions.Fraction`` over the rationals.  Everything is homogeneous with
respect to the standard grading (``deg x_i = 1``).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]
Term = Tuple[int, Monomial]
Poly = Dict[Monomial, object]
Vector = Dict[Term, object]

DEFAULT_PRIME = 32003


class RingError(ValueError):
    pass


class ParseError(RingError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------- fields


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The field F_p, elements are ints in [0, p)."""

    def __init__(self, p: int = DEFAULT_PRIME):
        if not (2 <= p < 2**31) or not _is_prime(p):
            raise RingError(f"characteristic must be a prime below 2^31, got {p}")
        self.p = p
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("fp", self.p))

    def __call__(self, value) -> int:
        if isinstance(value, Fraction):
            return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
        return int(value) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return pow(a, -1, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def to_int(self, a: int) -> int:
        """Symmetric representative, used for printing."""
        return a - self.p if a > self.p // 2 else a

    def to_json(self):
        return {"type": "fp", "p": self.p}


class Rationals:
    """The field Q with Fraction elements."""

    p = None
    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "Rationals()"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("qq")

    def __call__(self, value) -> Fraction:
        return Fraction(value)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in Q")
        return 1 / Fraction(a)

    def neg(self, a):
        return -a

    def to_int(self, a):
        return a

    def to_json(self):
        return {"type": "qq"}


def field_from_spec(spec) -> "PrimeField | Rationals":
    """Build a field from ``{"type": "fp", "p": 32003}``, ``"qq"`` or ``"fp:101"``."""
    if isinstance(spec, (PrimeField, Rationals)):
        return spec
    if spec is None:
        return PrimeField()
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s in ("qq", "q", "rationals"):
            return Rationals()
        if s.startswith("fp"):
            rest = s[2:].lstrip(":")
            return PrimeField(int(rest) if rest else DEFAULT_PRIME)
        raise RingError(f"unknown field {spec!r}")
    if isinstance(spec, dict):
        kind = spec.get("type")
        unknown = set(spec) - {"type", "p"}
        if unknown:
            raise RingError(f"unknown field keys {sorted(unknown)}")
        if kind == "fp":
            return PrimeField(int(spec.get("p", DEFAULT_PRIME)))
        if kind == "qq":
            return Rationals()
    raise RingError(f"unknown field {spec!r}")


# ---------------------------------------------------------------- monomials


def mon_degree(m: Monomial) -> int:
    return sum(m)


def mon_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mon_divides(a: Monomial, b: Monomial) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mon_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def mon_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x > y else y for x, y in zip(a, b))


def degrevlex_key(m: Monomial):
    """Sort key: larger key means larger monomial in graded reverse lex."""
    return (sum(m), tuple(-e for e in reversed(m)))


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> Tuple[Monomial, ...]:
    """All monomials of degree d, sorted descending in degrevlex."""
    if d < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=degrevlex_key, reverse=True)
    return tuple(out)


# ---------------------------------------------------------------- the ring


class PolyRing:
    """k[x_0, ..., x_n] with the standard grading and degrevlex order."""

    def __init__(self, nvars: int, field=None, names: Optional[Sequence[str]] = None):
        if nvars < 1:
            raise RingError("need at least one variable")
        self.nvars = nvars
        self.field = field_from_spec(field)
        if names is None:
            names = [f"x{i}" for i in range(nvars)]
        names = list(names)
        if len(names) != nvars or len(set(names)) != nvars:
            raise RingError("variable names must be distinct, one per variable")
        for nm in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                raise RingError(f"bad variable name {nm!r}")
        self.names = tuple(names)
        self.one_mon: Monomial = (0,) * nvars

    def __repr__(self):
        return f"PolyRing({self.nvars}, {self.field!r}, {list(self.names)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and other.names == self.names
            and other.field == self.field
        )

    def __hash__(self):
        return hash((self.names, self.field))

    def var(self, i: int) -> Monomial:
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)

    def gens(self) -> List["GradedPoly"]:
        return [GradedPoly(self, {self.var(i): self.field.one}) for i in range(self.nvars)]

    def poly(self, value) -> "GradedPoly":
        if isinstance(value, GradedPoly):
            return value
        if isinstance(value, str):
            return parse_poly(value, self)
        if isinstance(value, dict):
            return GradedPoly(self, value)
        return GradedPoly(self, {self.one_mon: self.field(value)} if value else {})

    def to_json(self):
        return {"field": self.field.to_json(), "variables": list(self.names)}


# ---------------------------------------------------------------- dict arithmetic


def clean(d: dict, field) -> dict:
    if field.p:
        p = field.p
        return {k: v % p for k, v in d.items() if v % p}
    return {k: v for k, v in d.items() if v}


def poly_degree(f: Poly) -> Optional[int]:
    """Common degree of a homogeneous nonzero poly, None for zero, -1 if mixed."""
    degs = {sum(m) for m in f}
    if not degs:
        return None
    if len(degs) > 1:
        return -1
    return degs.pop()


def poly_add(a: Poly, b: Poly, field, sign: int = 1) -> Poly:
    out = dict(a)
    p = field.p
    for m, c in b.items():
        v = out.get(m, 0) + (c if sign == 1 else -c)
        if p:
            v %= p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_mul(a: Poly, b: Poly, field) -> Poly:
    out: dict = {}
    p = field.p
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return clean(out, field) if p else {k: v for k, v in out.items() if v}


def poly_scale(a: Poly, c, field) -> Poly:
    p = field.p
    if p:
        c %= p
        if not c:
            return {}
        return {m: (v * c) % p for m, v in a.items()}
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def vec_add(a: Vector, b: Vector, field, coef=1) -> Vector:
    """Return a + coef*b."""
    out = dict(a)
    p = field.p
    for t, c in b.items():
        v = out.get(t, 0) + coef * c
        if p:
            v %= p
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def vec_scale(a: Vector, c, field) -> Vector:
    p = field.p
    if p:
        c %= p
        if not c:
            return {}
        return {t: (v * c) % p for t, v in a.items()}
    if not c:
        return {}
    return {t: v * c for t, v in a.items()}


def vec_mul_poly(a: Vector, f: Poly, field) -> Vector:
    out: dict = {}
    for (i, m), c in a.items():
        for mf, cf in f.items():
            t = (i, tuple(x + y for x, y in zip(m, mf)))
            out[t] = out.get(t, 0) + c * cf
    return clean(out, field)


def vec_mul_term(a: Vector, mon: Monomial, c, field) -> Vector:
    p = field.p
    if p:
        return {(i, tuple(x + y for x, y in zip(m, mon))): (v * c) % p for (i, m), v in a.items()}
    return {(i, tuple(x + y for x, y in zip(m, mon))): v * c for (i, m), v in a.items()}


def vec_from_polys(entries: Sequence[Poly]) -> Vector:
    out = {}
    for i, f in enumerate(entries):
        for m, c in f.items():
            out[(i, m)] = c
    return out


def vec_component(v: Vector, i: int) -> Poly:
    return {m: c for (j, m), c in v.items() if j == i}


def vec_reindex(v: Vector, mapping) -> Vector:
    """Move position i to mapping[i] (a dict or list)."""
    return {(mapping[i], m): c for (i, m), c in v.items()}


def vec_shift(v: Vector, offset: int) -> Vector:
    return {(i + offset, m): c for (i, m), c in v.items()}


def unit_vector(i: int, nvars: int, field) -> Vector:
    return {(i, (0,) * nvars): field.one}


# ---------------------------------------------------------------- graded polys


class GradedPoly:
    """A polynomial in canonical form (terms sorted descending in degrevlex)."""

    __slots__ = ("ring", "_terms", "homogeneous", "degree")

    def __init__(self, ring: PolyRing, terms):
        self.ring = ring
        if isinstance(terms, dict):
            d = clean(terms, ring.field)
        else:
            d = {}
            for m, c in terms:
                d[m] = d.get(m, 0) + c
            d = clean(d, ring.field)
        for m in d:
            if len(m) != ring.nvars or any(e < 0 for e in m):
                raise RingError(f"bad exponent vector {m}")
        self._terms = d
        deg = poly_degree(d)
        self.homogeneous = deg != -1
        self.degree = deg if deg not in (None, -1) else (None if deg is None else max(sum(m) for m in d))

    @property
    def terms(self) -> List[Tuple[Monomial, object]]:
        return sorted(self._terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def as_dict(self) -> Poly:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            if other.ring != self.ring:
                raise RingError("ring mismatch")
            return other
        return self.ring.poly(other)

    def __add__(self, other):
        return GradedPoly(self.ring, poly_add(self._terms, self._coerce(other)._terms, self.ring.field))

    __radd__ = __add__

    def __sub__(self, other):
        return GradedPoly(self.ring, poly_add(self._terms, self._coerce(other)._terms, self.ring.field, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return GradedPoly(self.ring, poly_scale(self._terms, -1, self.ring.field))

    def __mul__(self, other):
        return GradedPoly(self.ring, poly_mul(self._terms, self._coerce(other)._terms, self.ring.field))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.ring.poly(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.poly(other)
        return isinstance(other, GradedPoly) and other.ring == self.ring and other._terms == self._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"GradedPoly({self})"

    def __str__(self):
        return format_poly(self._terms, self.ring)


def format_monomial(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for nm, e in zip(names, m):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def format_poly(f: Poly, ring: PolyRing) -> str:
    if not f:
        return "0"
    field = ring.field
    out = []
    for m, c in sorted(f.items(), key=lambda t: degrevlex_key(t[0]), reverse=True):
        c = field.to_int(c)
        neg = c < 0
        a = -c if neg else c
        mon = format_monomial(m, ring.names)
        if not mon:
            body = str(a)
        elif a == 1:
            body = mon
        else:
            body = f"{a}*{mon}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|(\+)|(-)")
_KINDS = ("num", "var", "pow", "mul", "add", "sub")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            return toks
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        toks.append((_KINDS[m.lastindex - 1], m.group(m.lastindex), pos))
        pos = m.end()


def parse_poly(text: str, ring: PolyRing) -> GradedPoly:
    """Parse ``poly := term (("+"|"-") term)*`` with
    ``term := [int "*"] var ("^" nat)? ("*" var ("^" nat)?)* | int``.

    A leading sign is accepted on the first term.
    """
    toks = _tokenize(text)
    index = {nm: i for i, nm in enumerate(ring.names)}
    field = ring.field
    i = 0
    terms: Dict[Monomial, object] = {}

    def peek():
        return toks[i] if i < len(toks) else ("end", "", len(text))

    if not toks:
        raise ParseError("empty polynomial", 0)
    sign = 1
    first = True
    while True:
        kind, val, pos = peek()
        if first and kind in ("add", "sub"):
            sign = -1 if kind == "sub" else 1
            i += 1
            kind, val, pos = peek()
        first = False
        coef = None
        exps = [0] * ring.nvars
        if kind == "num":
            coef = Fraction(val)
            i += 1
            kind, val, pos = peek()
            if kind == "mul":
                i += 1
                kind, val, pos = peek()
                if kind != "var":
                    raise ParseError("expected variable after '*'", pos)
            else:
                kind = None
        if kind == "var":
            while True:
                kind, val, pos = peek()
                if kind != "var":
                    raise ParseError("expected variable", pos)
                if val not in index:
                    raise ParseError(f"unknown variable {val!r}", pos)
                i += 1
                e = 1
                kind, _, pos2 = peek()
                if kind == "pow":
                    i += 1
                    kind, val2, pos2 = peek()
                    if kind != "num" or "/" in val2:
                        raise ParseError("expected natural exponent after '^'", pos2)
                    e = int(val2)
                    i += 1
                exps[index[val]] += e
                kind, _, pos3 = peek()
                if kind == "mul":
                    i += 1
                    continue
                break
        elif coef is None:
            raise ParseError("expected term", pos)
        c = field(sign * (coef if coef is not None else 1))
        m = tuple(exps)
        terms[m] = terms.get(m, 0) + c
        kind, val, pos = peek()
        if kind == "end":
            break
        if kind in ("add", "sub"):
            sign = -1 if kind == "sub" else 1
            i += 1
            if peek()[0] == "end":
                raise ParseError("dangling operator", pos)
            continue
        raise ParseError(f"unexpected token {val!r}", pos)
    return GradedPoly(ring, terms)


def poly_arith(a: GradedPoly, b, op: str) -> GradedPoly:
    """Exact add/sub/mul of two polys, or scale a by the scalar b."""
    if op == "scale":
        return GradedPoly(a.ring, poly_scale(a.as_dict(), a.ring.field(b), a.ring.field))
    if isinstance(b, GradedPoly) and b.ring != a.ring:
        raise RingError("ring mismatch")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise RingError(f"unknown operation {op!r}")


# ---------------------------------------------------------------- free modules


class FreeModule:
    """F = sum_i S(-a_i); generator i lives in degree twists[i].

    Twists may be negative for internal constructions (graded Hom modules);
    objects of the category itself keep all twists >= 0.
    """

    def __init__(self, ring: PolyRing, twists: Iterable[int]):
        self.ring = ring
        self.twists = tuple(int(a) for a in twists)

    @property
    def rank(self) -> int:
        return len(self.twists)

    def __repr__(self):
        return f"FreeModule(rank={self.rank}, twists={list(self.twists)})"

    def __eq__(self, other):
        return isinstance(other, FreeModule) and other.ring == self.ring and other.twists == self.twists

    def __hash__(self):
        return hash((self.ring, self.twists))

    def generated_nonnegatively(self) -> bool:
        return all(a >= 0 for a in self.twists)

    def term_degree(self, t: Term) -> int:
        return sum(t[1]) + self.twists[t[0]]

    def vector_degree(self, v: Vector) -> Optional[int]:
        """Degree of a homogeneous vector; None for zero; raises if inhomogeneous."""
        deg = None
        for t in v:
            d = sum(t[1]) + self.twists[t[0]]
            if deg is None:
                deg = d
            elif d != deg:
                raise RingError("inhomogeneous vector")
        return deg

    def is_homogeneous(self, v: Vector) -> bool:
        try:
            self.vector_degree(v)
            return True
        except RingError:
            return False

    def basis_vector(self, i: int) -> Vector:
        return unit_vector(i, self.ring.nvars, self.ring.field)

    def direct_sum(self, other: "FreeModule") -> "FreeModule":
        return FreeModule(self.ring, self.twists + other.twists)


def entry_degree_check(matrix: Sequence[Sequence[GradedPoly]], source: FreeModule, target: FreeModule) -> bool:
    """True iff every nonzero entry m_ij is homogeneous of degree
    source.twists[j] - target.twists[i] (degree-0 map source -> target)."""
    if len(matrix) != target.rank or any(len(row) != source.rank for row in matrix):
        raise RingError(
            f"matrix shape does not match ({target.rank} x {source.rank}) for the given free modules"
        )
    for i, row in enumerate(matrix):
        for j, f in enumerate(row):
            f = target.ring.poly(f)
            if f.is_zero():
                continue
            if not f.homogeneous or f.degree != source.twists[j] - target.twists[i]:
                return False
    return True
