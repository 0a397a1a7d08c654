# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled hot kernels over sorted, contiguous 64-bit key arrays.

Both loops release the GIL, so stage workers running on threads overlap on
real cores.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef fused key_t:
    cnp.int64_t
    cnp.float64_t


def merge(const key_t[::1] a, const key_t[::1] b):
    """Linear two-way merge of two sorted arrays (ties taken from ``a``)."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    if key_t is cnp.int64_t:
        out = np.empty(na + nb, dtype=np.int64)
    else:
        out = np.empty(na + nb, dtype=np.float64)
    cdef key_t[::1] dst = out
    cdef Py_ssize_t i = 0, j = 0, k = 0
    with nogil:
        while i < na and j < nb:
            if b[j] < a[i]:
                dst[k] = b[j]
                j += 1
            else:
                dst[k] = a[i]
                i += 1
            k += 1
        while i < na:
            dst[k] = a[i]
            i += 1
            k += 1
        while j < nb:
            dst[k] = b[j]
            j += 1
            k += 1
    return out


def overlap(const key_t[::1] a, const key_t[::1] b):
    """Multiset intersection size of two sorted arrays."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t i = 0, j = 0, n = 0
    with nogil:
        while i < na and j < nb:
            if a[i] < b[j]:
                i += 1
            elif b[j] < a[i]:
                j += 1
            else:
                n += 1
                i += 1
                j += 1
    return n
