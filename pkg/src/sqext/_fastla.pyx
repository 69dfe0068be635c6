# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mod-p row reduction kernels."""

from libc.stdint cimport int64_t


cdef inline int64_t _inv(int64_t a, int64_t p) nogil:
    cdef int64_t t = 0, newt = 1, r = p, newr = a % p, q, tmp
    if newr < 0:
        newr += p
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_modp(int64_t[:, ::1] A, int64_t p):
    """Reduce A (entries in [0, p)) in place to reduced row echelon form.

    Returns the list of pivot columns.
    """
    cdef Py_ssize_t nrows = A.shape[0]
    cdef Py_ssize_t ncols = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int64_t inv, f, v, tmp
    pivots = []
    for c in range(ncols):
        if r >= nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                tmp = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = tmp
        inv = _inv(A[r, c], p)
        if inv != 1:
            for j in range(c, ncols):
                A[r, j] = (A[r, j] * inv) % p
        for i in range(nrows):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            for j in range(c, ncols):
                if A[r, j] != 0:
                    v = (A[i, j] - f * A[r, j]) % p
                    if v < 0:
                        v += p
                    A[i, j] = v
        pivots.append(c)
        r += 1
    return pivots
