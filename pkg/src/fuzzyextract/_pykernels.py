"""Pure-Python versions of the hot kernels. Same signatures as the compiled module."""


def levenshtein(a, b, max_dist=-1):
    """Unit-cost edit distance. With max_dist >= 0, any distance above it returns max_dist + 1."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la < lb:
        a, b, la, lb = b, a, lb, la
    if max_dist >= 0 and la - lb > max_dist:
        return max_dist + 1
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur = [i] + [0] * lb
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
        prev = cur
    d = prev[lb]
    if max_dist >= 0 and d > max_dist:
        return max_dist + 1
    return d


def fed_dp(ew, cw, eds, free_ends):
    """Token-level weighted edit DP.

    ew: entity token weights (rows, insertion cost), cw: candidate column weights
    (deletion cost), eds: row-major m*c similarities with negative entries where
    substitution is not allowed. Returns (total, deletion, insertion, substitution).
    """
    m = len(ew)
    c = len(cw)
    # each cell: (total, deletion, insertion, substitution)
    prev = [None] * (c + 1)
    prev[0] = (0.0, 0.0, 0.0, 0.0)
    for j in range(1, c + 1):
        if free_ends:
            prev[j] = (0.0, 0.0, 0.0, 0.0)
        else:
            p = prev[j - 1]
            prev[j] = (p[0] + cw[j - 1], p[1] + cw[j - 1], p[2], p[3])
    for i in range(1, m + 1):
        we = ew[i - 1]
        cur = [None] * (c + 1)
        p = prev[0]
        cur[0] = (p[0] + we, p[1], p[2] + we, p[3])
        base = (i - 1) * c
        for j in range(1, c + 1):
            best = None
            s = eds[base + j - 1]
            if s >= 0.0:
                d = prev[j - 1]
                sc = (1.0 - s) * (we + cw[j - 1])
                best = (d[0] + sc, d[1], d[2], d[3] + sc)
            d = cur[j - 1]
            cand = (d[0] + cw[j - 1], d[1] + cw[j - 1], d[2], d[3])
            if best is None or cand[0] < best[0]:
                best = cand
            d = prev[j]
            cand = (d[0] + we, d[1], d[2] + we, d[3])
            if cand[0] < best[0]:
                best = cand
            cur[j] = best
        prev = cur
    if free_ends:
        best = prev[0]
        for j in range(1, c + 1):
            if prev[j][0] < best[0]:
                best = prev[j]
        return best
    return prev[c]


def count_filter(qgids, qcnts, offsets, post_sids, post_cnts, str_len, need, scratch=None):
    """Strings sharing at least need[len(string)] bigrams (multiset count) with the query.

    Lengths with need <= 0 are never reported; the caller handles them. `scratch`
    is a zeroed per-string counter buffer used only by the compiled version.
    """
    shared = {}
    for g, cq in zip(qgids, qcnts):
        for k in range(offsets[g], offsets[g + 1]):
            s = post_sids[k]
            cs = post_cnts[k]
            shared[s] = shared.get(s, 0) + (cq if cq < cs else cs)
    out = []
    n_need = len(need)
    for s, c in shared.items():
        ln = str_len[s]
        if ln < n_need:
            t = need[ln]
            if t > 0 and c >= t:
                out.append(s)
    return out
