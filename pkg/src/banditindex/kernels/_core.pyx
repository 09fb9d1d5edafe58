# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel for the Sherman-Morrison column-advancement inner loop.

This module mirrors :mod:`banditindex.kernels.fallback`; see that module for
the reference implementation and the full contract.  Arrays are row-major
``float64`` and are addressed in *position space*: row ``p`` of ``X`` holds the
state currently stored at position ``p``, while columns of ``X`` stay in
original state order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def advance_column(double[:, ::1] X, double[:, ::1] WT, Py_ssize_t base,
                   Py_ssize_t t, Py_ssize_t col, double[::1] V,
                   double eps_den, bint full):
    """Advance column ``col`` of ``X`` through the pending rank-1 updates.

    ``t`` is the number of states removed so far (the advanced column belongs
    to the most recent removal, which sits at position ``n - t``).  Rows
    ``base .. t-2`` of ``WT`` hold the scaled update directions accumulated
    since ``X`` was last made fully current.  On success the scaled result is
    written to row ``t - 1 - base`` of ``WT`` and the denominator
    ``1 + V[n - t]`` is returned; if the denominator's magnitude is at most
    ``eps_den`` nothing is written and the near-zero denominator is returned.

    When ``full`` is false, updates run over shrinking prefixes that cover
    only the still-active positions plus the positions of not-yet-applied
    update directions; when true, every update spans all ``n`` positions.
    """
    cdef Py_ssize_t n = X.shape[0]
    # The seed must cover every position later read as an update pivot (the
    # first pending update reads position n - 1 - base), not just the
    # still-active prefix.
    cdef Py_ssize_t span = n if full else n - base
    cdef Py_ssize_t ell, L, i, r
    cdef double vs, inv, denom

    with nogil:
        for i in range(span):
            V[i] = X[i, col]
        for ell in range(base, t - 1):
            vs = V[n - 1 - ell]
            if vs != 0.0:
                r = ell - base
                L = n if full else n - 1 - ell
                for i in range(L):
                    V[i] -= vs * WT[r, i]
        denom = 1.0 + V[n - t]
    if -eps_den <= denom <= eps_den:
        return denom
    inv = 1.0 / denom
    L = n if full else n - t
    r = t - 1 - base
    with nogil:
        for i in range(L):
            WT[r, i] = V[i] * inv
    return denom
