# cython: boundscheck=False, wraparound=False, cdivision=True
"""Bit-parallel transitive closure over uint64-packed relation rows."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def transitive_closure(bits):
    """Warshall closure on row bitsets: O(n^2 * n/64) word operations."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] dense = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t n = dense.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    cdef Py_ssize_t words = (n + 63) >> 6
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] rows = np.zeros((n, words), dtype=np.uint64)
    cdef cnp.uint64_t[:, :] r = rows
    cdef cnp.uint8_t[:, :] d = dense
    cdef Py_ssize_t i, j, k, w
    cdef cnp.uint64_t mask

    for i in range(n):
        for j in range(n):
            if d[i, j]:
                r[i, j >> 6] |= (<cnp.uint64_t>1) << (j & 63)

    for k in range(n):
        w = k >> 6
        mask = (<cnp.uint64_t>1) << (k & 63)
        for i in range(n):
            if r[i, w] & mask:
                for j in range(words):
                    r[i, j] |= r[k, j]

    out = np.zeros((n, n), dtype=bool)
    cdef cnp.uint8_t[:, :] o = out.view(np.uint8)
    for i in range(n):
        for j in range(n):
            if r[i, j >> 6] & ((<cnp.uint64_t>1) << (j & 63)):
                o[i, j] = 1
    return out
