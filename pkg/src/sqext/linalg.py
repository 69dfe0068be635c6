"""Dense exact linear algebra over F_p and Q.

The mod-p row reduction runs in the compiled ``_fastla`` extension when it is
importable and falls back to a numpy implementation otherwise.  Matrices are
numpy arrays: ``int64`` with entries in ``[0, p)`` over F_p, ``object``
arrays of Fractions over Q.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import _fastla_py

try:
    from ._fastla import rref_modp as _rref_modp_compiled
except ImportError:  # pragma: no cover - depends on the build
    _rref_modp_compiled = None

BACKEND = "cython" if _rref_modp_compiled is not None else "python"
_rref_modp = _rref_modp_compiled or _fastla_py.rref_modp


def available_backends():
    out = ["python"]
    if _rref_modp_compiled is not None:
        out.insert(0, "cython")
    return out


def set_backend(name: str) -> None:
    """Select the mod-p kernel ("cython" or "python")."""
    global BACKEND, _rref_modp
    if name == "cython":
        if _rref_modp_compiled is None:
            raise RuntimeError("compiled kernel not built")
        _rref_modp = _rref_modp_compiled
    elif name == "python":
        _rref_modp = _fastla_py.rref_modp
    else:
        raise ValueError(name)
    BACKEND = name


def zeros(rows: int, cols: int, field) -> np.ndarray:
    if field.p:
        return np.zeros((rows, cols), dtype=np.int64)
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out


def zero_vector(n: int, field) -> np.ndarray:
    return zeros(1, n, field)[0]


def as_matrix(rows, field, ncols=None) -> np.ndarray:
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    A = zeros(len(rows), ncols, field)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            A[i, j] = field(v)
    return A


def rref(A: np.ndarray, field, copy: bool = True):
    """Return (R, pivots) with R the reduced row echelon form of A."""
    R = A.copy() if copy else A
    if R.size == 0:
        return R, []
    if field.p:
        R = np.ascontiguousarray(R, dtype=np.int64)
        pivots = _rref_modp(R, field.p)
    else:
        pivots = _fastla_py.rref_generic(R)
    return R, list(pivots)


def rank(A: np.ndarray, field) -> int:
    if A.size == 0:
        return 0
    return len(rref(A, field)[1])


def nullspace(A: np.ndarray, field) -> list:
    """Basis of {x : A x = 0} as a list of 1-D arrays."""
    ncols = A.shape[1]
    if A.shape[0] == 0:
        basis = []
        for j in range(ncols):
            v = zero_vector(ncols, field)
            v[j] = field.one
            basis.append(v)
        return basis
    R, pivots = rref(A, field)
    pivset = set(pivots)
    basis = []
    p = field.p
    for f in range(ncols):
        if f in pivset:
            continue
        v = zero_vector(ncols, field)
        v[f] = field.one
        for k, pc in enumerate(pivots):
            if R[k, f]:
                v[pc] = (-R[k, f]) % p if p else -R[k, f]
        basis.append(v)
    return basis


def column_basis(A: np.ndarray, field) -> list:
    """Indices of a maximal independent set of columns (leftmost choice)."""
    if A.size == 0:
        return []
    return rref(A, field)[1]


class Solver:
    """Solves A x = b for many right-hand sides after one elimination."""

    def __init__(self, A: np.ndarray, field):
        self.field = field
        m, n = A.shape
        self.m, self.n = m, n
        aug = zeros(m, n + m, field)
        if m:
            aug[:, :n] = A
            for i in range(m):
                aug[i, n + i] = field.one
            R, pivots = rref(aug, field, copy=False)
        else:
            R, pivots = aug, []
        self.pivots = [c for c in pivots if c < n]
        self.rank = len(self.pivots)
        self.E = R[:, n:]

    def solve(self, b: np.ndarray):
        """A particular solution, or None if the system is inconsistent."""
        field = self.field
        if self.m == 0:
            return zero_vector(self.n, field)
        y = self.E.dot(b)
        if field.p:
            y = y % field.p
        if any(y[self.rank:]):
            return None
        x = zero_vector(self.n, field)
        for k, c in enumerate(self.pivots):
            x[c] = y[k]
        return x


def solve(A: np.ndarray, b: np.ndarray, field):
    return Solver(A, field).solve(b)


def matmul(A: np.ndarray, B: np.ndarray, field) -> np.ndarray:
    C = A.dot(B)
    if field.p:
        C %= field.p
    return C
