"""Pure-Python (numpy) fallback for the compiled row reduction kernels."""

import numpy as np


def rref_modp(A, p):
    """Reduce the int64 array A (entries in [0, p)) in place; return pivot columns."""
    nrows, ncols = A.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv], c:] = A[[piv, r], c:]
        inv = pow(int(A[r, c]), -1, p)
        if inv != 1:
            A[r, c:] = (A[r, c:] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(col[rows], A[r, c:])) % p
        pivots.append(c)
        r += 1
    return pivots


def rref_generic(A):
    """Same reduction over an exact field for an object array (Fractions)."""
    nrows, ncols = A.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if A[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[[r, piv], c:] = A[[piv, r], c:]
        inv = 1 / A[r, c]
        A[r, c:] = A[r, c:] * inv
        for i in range(nrows):
            if i != r and A[i, c] != 0:
                A[i, c:] = A[i, c:] - A[i, c] * A[r, c:]
        pivots.append(c)
        r += 1
    return pivots
