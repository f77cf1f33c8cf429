# cython: language_level=3
"""Compiled hot kernels: Levenshtein distance, the bigram count filter and the token-level FuzzyED DP."""
from libc.stdlib cimport malloc, free


def levenshtein(str a, str b, int max_dist=-1):
    cdef Py_ssize_t la = len(a), lb = len(b), i, j
    cdef int cost, ins, dele, row_min, d
    cdef int *prev
    cdef int *cur
    cdef int *tmp
    cdef Py_UCS4 ca
    if a == b:
        return 0
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    if max_dist >= 0 and la - lb > max_dist:
        return max_dist + 1
    if lb == 0:
        return la
    prev = <int *> malloc((lb + 1) * sizeof(int))
    cur = <int *> malloc((lb + 1) * sizeof(int))
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            ca = a[i - 1]
            cur[0] = i
            row_min = i
            for j in range(1, lb + 1):
                cost = prev[j - 1] + (ca != b[j - 1])
                ins = prev[j] + 1
                if ins < cost:
                    cost = ins
                dele = cur[j - 1] + 1
                if dele < cost:
                    cost = dele
                cur[j] = cost
                if cost < row_min:
                    row_min = cost
            if max_dist >= 0 and row_min > max_dist:
                return max_dist + 1
            tmp = prev
            prev = cur
            cur = tmp
        d = prev[lb]
    finally:
        free(prev)
        free(cur)
    if max_dist >= 0 and d > max_dist:
        return max_dist + 1
    return d


def fed_dp(ew, cw, eds, bint free_ends):
    cdef double[::1] e = _as_array(ew)
    cdef double[::1] w = _as_array(cw)
    cdef double[::1] s = _as_array(eds)
    cdef Py_ssize_t m = e.shape[0], c = w.shape[0], i, j, k
    cdef double *prev = <double *> malloc(4 * (c + 1) * sizeof(double))
    cdef double *cur = <double *> malloc(4 * (c + 1) * sizeof(double))
    cdef double *tmp
    cdef double we, sv, sc, t, bt
    cdef int src
    try:
        for k in range(4):
            prev[k] = 0.0
        for j in range(1, c + 1):
            if free_ends:
                for k in range(4):
                    prev[4 * j + k] = 0.0
            else:
                for k in range(4):
                    prev[4 * j + k] = prev[4 * (j - 1) + k]
                prev[4 * j] += w[j - 1]
                prev[4 * j + 1] += w[j - 1]
        for i in range(1, m + 1):
            we = e[i - 1]
            for k in range(4):
                cur[k] = prev[k]
            cur[0] += we
            cur[2] += we
            for j in range(1, c + 1):
                # 0 = substitution, 1 = deletion, 2 = insertion
                src = -1
                bt = 0.0
                sv = s[(i - 1) * c + j - 1]
                if sv >= 0.0:
                    sc = (1.0 - sv) * (we + w[j - 1])
                    bt = prev[4 * (j - 1)] + sc
                    src = 0
                t = cur[4 * (j - 1)] + w[j - 1]
                if src < 0 or t < bt:
                    bt = t
                    src = 1
                t = prev[4 * j] + we
                if t < bt:
                    bt = t
                    src = 2
                if src == 0:
                    for k in range(4):
                        cur[4 * j + k] = prev[4 * (j - 1) + k]
                    cur[4 * j] += sc
                    cur[4 * j + 3] += sc
                elif src == 1:
                    for k in range(4):
                        cur[4 * j + k] = cur[4 * (j - 1) + k]
                    cur[4 * j] += w[j - 1]
                    cur[4 * j + 1] += w[j - 1]
                else:
                    for k in range(4):
                        cur[4 * j + k] = prev[4 * j + k]
                    cur[4 * j] += we
                    cur[4 * j + 2] += we
            tmp = prev
            prev = cur
            cur = tmp
        k = c
        if free_ends:
            k = 0
            for j in range(1, c + 1):
                if prev[4 * j] < prev[4 * k]:
                    k = j
        return (prev[4 * k], prev[4 * k + 1], prev[4 * k + 2], prev[4 * k + 3])
    finally:
        free(prev)
        free(cur)


cdef _as_array(x):
    import numpy as np
    return np.ascontiguousarray(x, dtype=np.float64)


def count_filter(qgids, qcnts, const long long[:] offsets, const int[:] post_sids,
                 const int[:] post_cnts, const int[:] str_len, const int[:] need, int[:] scratch):
    """Strings sharing at least need[len(string)] bigrams with the query; see _pykernels."""
    cdef Py_ssize_t ng = len(qgids), a, g, k, t, n_touched = 0
    cdef Py_ssize_t n_need = need.shape[0]
    cdef int cq, cs, s, ln
    cdef int *touched = NULL
    cdef Py_ssize_t cap = 0
    for a in range(ng):
        g = qgids[a]
        cap += offsets[g + 1] - offsets[g]
    if cap == 0:
        return []
    touched = <int *> malloc(cap * sizeof(int))
    out = []
    try:
        for a in range(ng):
            g = qgids[a]
            cq = qcnts[a]
            for k in range(offsets[g], offsets[g + 1]):
                s = post_sids[k]
                cs = post_cnts[k]
                if scratch[s] == 0:
                    touched[n_touched] = s
                    n_touched += 1
                scratch[s] += cq if cq < cs else cs
        for t in range(n_touched):
            s = touched[t]
            ln = str_len[s]
            if ln < n_need and need[ln] > 0 and scratch[s] >= need[ln]:
                out.append(s)
            scratch[s] = 0
    finally:
        free(touched)
    return out
