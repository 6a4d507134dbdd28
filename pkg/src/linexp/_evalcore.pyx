# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel: int64 grid scans.

Mirrors _evalcore_py exactly.  Callers guarantee (via evalcore's
safety bound) that every intermediate value fits in int64; the selector
routes unsafe boxes to the pure kernel instead.
"""

from libc.stdlib cimport free, malloc


cdef struct Rows:
    long long nrows
    long long *rel
    long long *divisor
    long long *const0
    long long *off   # per-row offsets into the entry arrays, 8 kinds
    long long *ent   # flattened entries


cdef int _build(object rows, Rows *out) except -1:
    # entry layout per row: lin(idx,coef)* exp(idx,coef)* mod(x,y,c)* prod(x,y,c)*
    cdef long long nrows = len(rows)
    cdef long long total = 0
    for row in rows:
        total += 2 * len(row[3]) + 2 * len(row[5]) + 3 * len(row[7]) + 3 * len(row[10])
    out.nrows = nrows
    out.rel = <long long *> malloc(nrows * sizeof(long long))
    out.divisor = <long long *> malloc(nrows * sizeof(long long))
    out.const0 = <long long *> malloc(nrows * sizeof(long long))
    out.off = <long long *> malloc((4 * nrows + 1) * sizeof(long long))
    out.ent = <long long *> malloc(max(total, 1) * sizeof(long long))
    if not (out.rel and out.divisor and out.const0 and out.off and out.ent):
        raise MemoryError()
    cdef long long p = 0, r = 0, i
    for row in rows:
        out.rel[r] = row[0]
        out.divisor[r] = row[1]
        out.const0[r] = row[2]
        li, lc, ei, ec = row[3], row[4], row[5], row[6]
        mx, my, mc = row[7], row[8], row[9]
        px, py, pc = row[10], row[11], row[12]
        out.off[4 * r] = p
        for i in range(len(li)):
            out.ent[p] = li[i]; out.ent[p + 1] = lc[i]; p += 2
        out.off[4 * r + 1] = p
        for i in range(len(ei)):
            out.ent[p] = ei[i]; out.ent[p + 1] = ec[i]; p += 2
        out.off[4 * r + 2] = p
        for i in range(len(mx)):
            out.ent[p] = mx[i]; out.ent[p + 1] = my[i]; out.ent[p + 2] = mc[i]; p += 3
        out.off[4 * r + 3] = p
        for i in range(len(px)):
            out.ent[p] = px[i]; out.ent[p + 1] = py[i]; out.ent[p + 2] = pc[i]; p += 3
        r += 1
    out.off[4 * nrows] = p
    return 0


cdef void _release(Rows *rs) noexcept:
    free(rs.rel); free(rs.divisor); free(rs.const0); free(rs.off); free(rs.ent)


cdef inline bint _row_holds(Rows *rs, long long r, long long *pt) noexcept:
    cdef long long k = 0, v, e, p, end, m
    p = rs.off[4 * r + 1]
    end = rs.off[4 * r + 2]
    while p < end:
        e = pt[rs.ent[p]]
        if e < 0 and -e > k:
            k = -e
        p += 2
    p = rs.off[4 * r + 3]
    end = rs.off[4 * r + 4]
    while p < end:
        e = pt[rs.ent[p + 1]]
        if e < 0 and -e > k:
            k = -e
        p += 3
    v = rs.const0[r] << k
    p = rs.off[4 * r]
    end = rs.off[4 * r + 1]
    while p < end:
        v += (rs.ent[p + 1] * pt[rs.ent[p]]) << k
        p += 2
    end = rs.off[4 * r + 2]
    while p < end:
        v += rs.ent[p + 1] << (pt[rs.ent[p]] + k)
        p += 2
    end = rs.off[4 * r + 3]
    while p < end:
        e = pt[rs.ent[p + 1]]
        if e >= 0:
            m = pt[rs.ent[p]] % (<long long> 1 << e)
            if m < 0:
                m += <long long> 1 << e
            v += (rs.ent[p + 2] * m) << k
        p += 3
    end = rs.off[4 * r + 4]
    while p < end:
        v += (rs.ent[p + 2] * pt[rs.ent[p]]) << (pt[rs.ent[p + 1]] + k)
        p += 3
    if rs.rel[r] == 0:
        return v == 0
    if rs.rel[r] == 1:
        return v <= 0
    if rs.rel[r] == 2:
        return v < 0
    m = v % (rs.divisor[r] << k)
    return m == 0


def first_sat(cs, lows, highs, long long limit):
    cdef long long n = cs[0]
    cdef Rows rs
    cdef long long *pt
    cdef long long *lo
    cdef long long *hi
    cdef long long seen = 0, i, r
    cdef bint ok
    for i in range(n):
        if lows[i] > highs[i]:
            return ("none", None)
    _build(cs[1], &rs)
    pt = <long long *> malloc(max(n, 1) * sizeof(long long))
    lo = <long long *> malloc(max(n, 1) * sizeof(long long))
    hi = <long long *> malloc(max(n, 1) * sizeof(long long))
    try:
        for i in range(n):
            pt[i] = lows[i]; lo[i] = lows[i]; hi[i] = highs[i]
        while True:
            seen += 1
            if seen > limit:
                return ("capped", None)
            ok = True
            for r in range(rs.nrows):
                if not _row_holds(&rs, r, pt):
                    ok = False
                    break
            if ok:
                return ("sat", tuple(pt[i] for i in range(n)))
            i = n - 1
            while i >= 0 and pt[i] == hi[i]:
                pt[i] = lo[i]
                i -= 1
            if i < 0:
                return ("none", None)
            pt[i] += 1
    finally:
        _release(&rs); free(pt); free(lo); free(hi)


def diff_on_grid(cs_a, cs_b, lows, highs, long long limit):
    cdef long long n = cs_a[0]
    cdef Rows ra, rb
    cdef long long *pt
    cdef long long *lo
    cdef long long *hi
    cdef long long seen = 0, i, r
    cdef bint a, b
    for i in range(n):
        if lows[i] > highs[i]:
            return ("none", None)
    _build(cs_a[1], &ra)
    _build(cs_b[1], &rb)
    pt = <long long *> malloc(max(n, 1) * sizeof(long long))
    lo = <long long *> malloc(max(n, 1) * sizeof(long long))
    hi = <long long *> malloc(max(n, 1) * sizeof(long long))
    try:
        for i in range(n):
            pt[i] = lows[i]; lo[i] = lows[i]; hi[i] = highs[i]
        while True:
            seen += 1
            if seen > limit:
                return ("capped", None)
            a = True
            for r in range(ra.nrows):
                if not _row_holds(&ra, r, pt):
                    a = False
                    break
            b = True
            for r in range(rb.nrows):
                if not _row_holds(&rb, r, pt):
                    b = False
                    break
            if a != b:
                return ("diff", tuple(pt[i] for i in range(n)))
            i = n - 1
            while i >= 0 and pt[i] == hi[i]:
                pt[i] = lo[i]
                i -= 1
            if i < 0:
                return ("none", None)
            pt[i] += 1
    finally:
        _release(&ra); _release(&rb); free(pt); free(lo); free(hi)


def check(cs, point):
    cdef Rows rs
    cdef long long n = cs[0]
    cdef long long *pt = <long long *> malloc(max(n, 1) * sizeof(long long))
    cdef long long i, r
    cdef bint ok = True
    _build(cs[1], &rs)
    try:
        for i in range(n):
            pt[i] = point[i]
        for r in range(rs.nrows):
            if not _row_holds(&rs, r, pt):
                ok = False
                break
        return ok
    finally:
        _release(&rs); free(pt)
