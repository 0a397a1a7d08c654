"""Numpy fallback for the compiled kernels.

The merge is vectorized via searchsorted (near-linear in practice; the
strictly linear single-pass loop lives in the compiled backend).  Tiny inputs
short-circuit to plain Python to dodge numpy call overhead, which dominates
in the exhaustive small-domain verification suites.
"""

import numpy as np

_TINY = 96


def merge(a, b):
    """Merge two sorted arrays of a common dtype; returns a fresh array."""
    na, nb = a.shape[0], b.shape[0]
    if na == 0:
        return b.copy()
    if nb == 0:
        return a.copy()
    if na + nb <= _TINY:
        out, i, j = [], 0, 0
        xs, ys = a.tolist(), b.tolist()
        while i < na and j < nb:
            if ys[j] < xs[i]:
                out.append(ys[j])
                j += 1
            else:
                out.append(xs[i])
                i += 1
        out.extend(xs[i:])
        out.extend(ys[j:])
        return np.array(out, dtype=a.dtype)
    out = np.empty(na + nb, dtype=a.dtype)
    # Final position of each element; ties resolved a-first by the
    # left/right split, which keeps the two index sets disjoint.
    out[np.arange(na) + np.searchsorted(b, a, side="left")] = a
    out[np.arange(nb) + np.searchsorted(a, b, side="right")] = b
    return out


def overlap(a, b):
    """Multiset intersection size of two sorted arrays."""
    na, nb = a.shape[0], b.shape[0]
    if na == 0 or nb == 0:
        return 0
    if na + nb <= _TINY:
        xs, ys = a.tolist(), b.tolist()
        i = j = n = 0
        while i < na and j < nb:
            if xs[i] < ys[j]:
                i += 1
            elif ys[j] < xs[i]:
                j += 1
            else:
                n += 1
                i += 1
                j += 1
        return n
    values, counts = np.unique(a, return_counts=True)
    in_b = np.searchsorted(b, values, side="right") - np.searchsorted(b, values, side="left")
    return int(np.minimum(counts, in_b).sum())
