# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels exploiting the sparsity of Gell-Mann type generators.

Each generator has at most ``d`` nonzero entries, so triple-product traces and
Kronecker sums can be accumulated entry by entry instead of through dense
matrix products.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    MAX_SITES = 32


cdef _csr(const double complex[:, :, ::1] mats):
    """Row-compressed nonzeros of a stack of square matrices."""
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t a, r, c, k = 0
    ptr = np.zeros(m * d + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] p = ptr
    for a in range(m):
        for r in range(d):
            for c in range(d):
                if mats[a, r, c] != 0:
                    k += 1
            p[a * d + r + 1] = k
    cols = np.empty(k, dtype=np.intp)
    vals = np.empty(k, dtype=np.complex128)
    cdef Py_ssize_t[::1] cv = cols
    cdef double complex[::1] vv = vals
    k = 0
    for a in range(m):
        for r in range(d):
            for c in range(d):
                if mats[a, r, c] != 0:
                    cv[k] = c
                    vv[k] = mats[a, r, c]
                    k += 1
    return ptr, cols, vals


def triple_traces(gens):
    """Return ``T[a, b, c] = Tr(G_a G_b G_c)`` for a stack of generators."""
    cdef const double complex[:, :, ::1] g = np.ascontiguousarray(gens, dtype=np.complex128)
    cdef Py_ssize_t n = g.shape[0], d = g.shape[1]
    ptr_a, cols_a, vals_a = _csr(g)
    cdef Py_ssize_t[::1] ptr = ptr_a
    cdef Py_ssize_t[::1] cols = cols_a
    cdef double complex[::1] vals = vals_a
    out = np.zeros((n, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    cdef Py_ssize_t a, b, c, x, ia, ib, y, z
    cdef double complex va, acc
    for a in range(n):
        for b in range(n):
            for c in range(n):
                acc = 0
                for x in range(d):
                    for ia in range(ptr[a * d + x], ptr[a * d + x + 1]):
                        y = cols[ia]
                        va = vals[ia]
                        for ib in range(ptr[b * d + y], ptr[b * d + y + 1]):
                            z = cols[ib]
                            acc = acc + va * vals[ib] * g[c, z, x]
                o[a, b, c] = acc
    return out


def site_operator(stacks, term_idx, term_val, sites, Py_ssize_t d, Py_ssize_t n_particles):
    """Accumulate ``sum_t c_t * prod_s stacks[s][idx[t, s]]^(sites[s])`` densely.

    Sites must be distinct; particle 0 is the most significant tensor factor.
    """
    cdef Py_ssize_t k = len(sites)
    if k > MAX_SITES:
        raise ValueError("too many sites for compiled kernel")
    cdef Py_ssize_t dim = d ** n_particles
    cdef Py_ssize_t s, t, r, p

    # global numbering of matrices: site s owns [off[s], off[s] + len(stacks[s]))
    mats = np.ascontiguousarray(np.concatenate([np.asarray(st, dtype=np.complex128) for st in stacks]))
    offsets = np.cumsum([0] + [len(st) for st in stacks[:-1]]).astype(np.intp)
    ptr_a, cols_a, vals_a = _csr(mats)
    rows_a = np.empty_like(cols_a)
    for r in range(mats.shape[0] * d):
        rows_a[ptr_a[r]:ptr_a[r + 1]] = r % d
    cdef Py_ssize_t[::1] ptr = ptr_a
    cdef Py_ssize_t[::1] cols = cols_a
    cdef Py_ssize_t[::1] rows = rows_a
    cdef double complex[::1] vals = vals_a
    cdef Py_ssize_t[::1] off = offsets

    strides_a = np.array([d ** (n_particles - 1 - q) for q in sites], dtype=np.intp)
    cdef Py_ssize_t[::1] stride = strides_a
    rest = [q for q in range(n_particles) if q not in set(sites)]
    rest_off = np.zeros(1, dtype=np.intp)
    for q in rest:
        rest_off = (rest_off[:, None] + np.arange(d, dtype=np.intp)[None, :] * d ** (n_particles - 1 - q)).ravel()
    cdef Py_ssize_t[::1] ro = rest_off
    cdef Py_ssize_t n_rest = rest_off.shape[0]

    cdef const Py_ssize_t[:, ::1] idx = np.ascontiguousarray(term_idx, dtype=np.intp)
    cdef const double complex[::1] cval = np.ascontiguousarray(term_val, dtype=np.complex128)
    out = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] o = out

    cdef Py_ssize_t lo[MAX_SITES]
    cdef Py_ssize_t hi[MAX_SITES]
    cdef Py_ssize_t cur[MAX_SITES]
    cdef Py_ssize_t m, row0, col0, level
    cdef double complex v
    cdef bint empty
    for t in range(idx.shape[0]):
        if cval[t] == 0:
            continue
        empty = False
        for s in range(k):
            m = off[s] + idx[t, s]
            lo[s] = ptr[m * d]
            hi[s] = ptr[(m + 1) * d]
            cur[s] = lo[s]
            if lo[s] == hi[s]:
                empty = True
        if empty:
            continue
        while True:
            v = cval[t]
            row0 = 0
            col0 = 0
            for s in range(k):
                v = v * vals[cur[s]]
                row0 = row0 + rows[cur[s]] * stride[s]
                col0 = col0 + cols[cur[s]] * stride[s]
            for p in range(n_rest):
                o[row0 + ro[p], col0 + ro[p]] += v
            level = k - 1
            while level >= 0:
                cur[level] += 1
                if cur[level] < hi[level]:
                    break
                cur[level] = lo[level]
                level -= 1
            if level < 0:
                break
    return out
