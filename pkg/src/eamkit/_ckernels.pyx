# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmask kernels; signatures mirror ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def pair_list(int n):
    i, j = np.triu_indices(n, k=1)
    return i.astype(np.int64), j.astype(np.int64)


def cut_sums(entropies, int n):
    # cut(i, j) = T_i + T_j - 2 U_ij with T_i = sum over masks holding i,
    # U_ij = sum over masks holding both; only set bits are visited
    cdef const double[::1] s = np.ascontiguousarray(entropies, dtype=np.float64)
    t_arr = np.zeros(n, dtype=np.float64)
    u_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[::1] t = t_arr
    cdef double[:, ::1] u = u_arr
    cdef long long m, total = 1LL << n
    cdef int bits[64]
    cdef int a, b, c, k
    cdef double v
    with nogil:
        for m in range(1, total):
            v = s[m]
            if v == 0.0:
                continue
            c = 0
            for k in range(n):
                if (m >> k) & 1:
                    bits[c] = k
                    c += 1
            for a in range(c):
                t[bits[a]] += v
                for b in range(a + 1, c):
                    u[bits[a], bits[b]] += v
    out = np.empty(n * (n - 1) // 2, dtype=np.float64)
    cdef double[::1] o = out
    cdef int i, j, p = 0
    for i in range(n):
        for j in range(i + 1, n):
            o[p] = t[i] + t[j] - 2.0 * u[i, j]
            p += 1
    return out


def predict_all(weights, int n):
    cdef const double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.zeros(1LL << n, dtype=np.float64)
    cdef double[::1] res = out
    cdef double[::1] rowsum = np.ascontiguousarray(np.asarray(weights, dtype=np.float64).sum(axis=1))
    # inner[m] = sum_{i in m} w[i, k], built by adding the top bit of m
    inner_arr = np.zeros(max(1, 1LL << (n - 1)), dtype=np.float64)
    cdef double[::1] inner = inner_arr
    cdef long long r, lo, hb
    cdef int k, h
    with nogil:
        for k in range(n):
            lo = 1LL << k
            inner[0] = 0.0
            for h in range(k):
                hb = 1LL << h
                for r in range(hb):
                    inner[hb + r] = inner[r] + w[h, k]
            for r in range(lo):
                res[lo + r] = res[r] + rowsum[k] - 2.0 * inner[r]
    return out


def schmidt_indices(long long mask, int n):
    cdef int k, b
    cdef int n_in = 0
    cdef int inside[64]
    cdef int outside[64]
    cdef int n_out = 0
    for k in range(n):
        if (mask >> k) & 1:
            inside[n_in] = k
            n_in += 1
        else:
            outside[n_out] = k
            n_out += 1
    out = np.empty((1LL << n_in, 1LL << n_out), dtype=np.int64)
    cdef long long[:, ::1] t = out
    cdef long long r, c, rv, cv
    cdef long long[::1] colv = np.empty(1LL << n_out, dtype=np.int64)
    with nogil:
        for c in range(1LL << n_out):
            cv = 0
            for b in range(n_out):
                if (c >> b) & 1:
                    cv |= 1LL << outside[b]
            colv[c] = cv
        for r in range(1LL << n_in):
            rv = 0
            for b in range(n_in):
                if (r >> b) & 1:
                    rv |= 1LL << inside[b]
            for c in range(1LL << n_out):
                t[r, c] = rv | colv[c]
    return out


def sector_states(int n, int n_up):
    cdef long long m, total = 1LL << n
    cdef Py_ssize_t count = 0
    out = np.empty(total, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for m in range(total):
            if __builtin_popcountll(m) == n_up:
                o[count] = m
                count += 1
    return out[:count].copy()


def xxz_sector(int n, bonds_i, bonds_j, weights, double delta):
    states = sector_states(n, n // 2)
    cdef long long[::1] st = states
    cdef Py_ssize_t dim = states.shape[0]
    lookup_arr = np.full(1LL << n, -1, dtype=np.int64)
    lookup_arr[states] = np.arange(dim, dtype=np.int64)
    cdef long long[::1] lookup = lookup_arr
    cdef long long[::1] bi = np.ascontiguousarray(bonds_i, dtype=np.int64)
    cdef long long[::1] bj = np.ascontiguousarray(bonds_j, dtype=np.int64)
    cdef double[::1] bw = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n_bonds = bi.shape[0]
    cdef Py_ssize_t cap = dim * (n_bonds + 1)
    rows_arr = np.empty(cap, dtype=np.int64)
    cols_arr = np.empty(cap, dtype=np.int64)
    vals_arr = np.empty(cap, dtype=np.float64)
    cdef long long[::1] rows = rows_arr
    cdef long long[::1] cols = cols_arr
    cdef double[::1] vals = vals_arr
    cdef Py_ssize_t s, b, nnz = 0
    cdef long long state, a, c
    cdef double diag
    with nogil:
        for s in range(dim):
            state = st[s]
            diag = 0.0
            for b in range(n_bonds):
                a = (state >> bi[b]) & 1
                c = (state >> bj[b]) & 1
                if a == c:
                    diag += 0.25 * delta * bw[b]
                else:
                    diag -= 0.25 * delta * bw[b]
                    rows[nnz] = s
                    cols[nnz] = lookup[state ^ ((1LL << bi[b]) | (1LL << bj[b]))]
                    vals[nnz] = 0.5 * bw[b]
                    nnz += 1
            rows[nnz] = s
            cols[nnz] = s
            vals[nnz] = diag
            nnz += 1
    return states, rows_arr[:nnz].copy(), cols_arr[:nnz].copy(), vals_arr[:nnz].copy()


def fermion_signs(long long mask, int n):
    out = np.empty(1LL << n, dtype=np.float64)
    cdef double[::1] o = out
    cdef long long x, total = 1LL << n
    cdef int i, occ, below, parity
    with nogil:
        for x in range(total):
            below = 0
            parity = 0
            for i in range(n):
                occ = (x >> i) & 1
                if (mask >> i) & 1:
                    parity ^= occ & below
                else:
                    below ^= occ
            o[x] = 1.0 - 2.0 * parity
    return out
