# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Must stay in lockstep with ``_kernels_py.py`` (same algorithm, same
arithmetic order); tests/test_kernels.py checks parity.
"""

from libc.stdlib cimport free, malloc


cdef double INF = float("inf")


cdef int _leftmost_root(double* xs, double* sl, double* ic, int K, double* out_t) noexcept nogil:
    """Leftmost t with D(t) >= 0 for the non-decreasing piecewise-linear D;
    writes t, returns the containing piece index."""
    cdef int k
    cdef double t
    if sl[0] * xs[0] + ic[0] >= 0.0:
        out_t[0] = xs[0]
        return 0
    for k in range(K):
        if sl[k] * xs[k + 1] + ic[k] >= 0.0:
            if sl[k] > 0.0:
                t = -ic[k] / sl[k]
                if t < xs[k]:
                    t = xs[k]
                elif t > xs[k + 1]:
                    t = xs[k + 1]
                out_t[0] = t
            else:
                out_t[0] = xs[k + 1]
            return k
    out_t[0] = xs[K]
    return K - 1


def chain_argmin(double[::1] quad, double[::1] lin, double[::1] out):
    """See ``_kernels_py.chain_argmin``."""
    cdef int n = quad.shape[0]
    if n == 0:
        return
    cdef int cap = n + 6
    cdef double* xs = <double*> malloc(cap * sizeof(double))
    cdef double* sl = <double*> malloc(cap * sizeof(double))
    cdef double* ic = <double*> malloc(cap * sizeof(double))
    cdef double* m = <double*> malloc(n * sizeof(double))
    if xs == NULL or sl == NULL or ic == NULL or m == NULL:
        free(xs); free(sl); free(ic); free(m)
        raise MemoryError()
    cdef int K = 1
    cdef int i, k, j, newK
    cdef double root, a, b
    try:
        with nogil:
            xs[0] = 0.0
            xs[1] = 1.0
            sl[0] = 2.0 * quad[0]
            ic[0] = lin[0]
            _leftmost_root(xs, sl, ic, K, &m[0])

            for i in range(1, n):
                k = _leftmost_root(xs, sl, ic, K, &root)
                if (i + 1) % 2 == 0:
                    # even leg: D <- max(D, 0)
                    if root >= 1.0:
                        K = 1
                        xs[0] = 0.0
                        xs[1] = 1.0
                        sl[0] = 0.0
                        ic[0] = 0.0
                    elif root > 0.0:
                        newK = K - k + 1
                        for j in range(K - 1, k - 1, -1):
                            sl[j - k + 1] = sl[j]
                            ic[j - k + 1] = ic[j]
                        for j in range(K, k, -1):
                            xs[j - k + 1] = xs[j]
                        xs[0] = 0.0
                        xs[1] = root
                        sl[0] = 0.0
                        ic[0] = 0.0
                        K = newK
                else:
                    # odd leg: D <- min(D, 0)
                    if root <= 0.0:
                        K = 1
                        xs[0] = 0.0
                        xs[1] = 1.0
                        sl[0] = 0.0
                        ic[0] = 0.0
                    elif root < 1.0:
                        xs[k + 1] = root
                        xs[k + 2] = 1.0
                        sl[k + 1] = 0.0
                        ic[k + 1] = 0.0
                        K = k + 2
                a = 2.0 * quad[i]
                b = lin[i]
                for j in range(K):
                    sl[j] += a
                    ic[j] += b
                _leftmost_root(xs, sl, ic, K, &m[i])

            out[n - 1] = m[n - 1]
            for i in range(n - 1, 0, -1):
                if (i + 1) % 2 == 0:
                    out[i - 1] = out[i] if out[i] > m[i - 1] else m[i - 1]
                else:
                    out[i - 1] = out[i] if out[i] < m[i - 1] else m[i - 1]
    finally:
        free(xs)
        free(sl)
        free(ic)
        free(m)


def grid_search(double[:, ::1] cost, long long c_units, long long[::1] out_idx):
    """See ``_kernels_py.grid_search``."""
    cdef int n = cost.shape[0]
    cdef int res = cost.shape[1]
    cdef double best = INF
    cdef long long* gi = <long long*> malloc(n * sizeof(long long))
    cdef long long* lvl = <long long*> malloc(n * sizeof(long long))
    cdef long long* air = <long long*> malloc(n * sizeof(long long))
    cdef double* pc = <double*> malloc(n * sizeof(double))
    if gi == NULL or lvl == NULL or air == NULL or pc == NULL:
        free(gi); free(lvl); free(air); free(pc)
        raise MemoryError()
    cdef int i
    cdef long long g, mx, rem, nl
    cdef double npc
    cdef int j
    try:
        with nogil:
            i = 0
            gi[0] = -1
            lvl[0] = 0
            air[0] = 0
            pc[0] = 0.0
            while i >= 0:
                gi[i] += 1
                g = gi[i]
                if i % 2 == 0:
                    mx = res - 1 - lvl[i]
                    rem = c_units - air[i]
                    if rem < mx:
                        mx = rem
                else:
                    mx = lvl[i]
                if g > mx:
                    i -= 1
                    continue
                nl = lvl[i] + g if i % 2 == 0 else lvl[i] - g
                npc = pc[i] + cost[i, nl]
                if npc >= best:
                    continue
                if i == n - 1:
                    best = npc
                    for j in range(n):
                        out_idx[j] = gi[j]
                    continue
                lvl[i + 1] = nl
                air[i + 1] = air[i] + (g if i % 2 == 0 else 0)
                pc[i + 1] = npc
                i += 1
                gi[i] = -1
    finally:
        free(gi)
        free(lvl)
        free(air)
        free(pc)
    return best
